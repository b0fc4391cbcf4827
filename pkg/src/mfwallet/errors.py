"""Exception taxonomy shared across the wallet stack.

Every error carries a stable string code so the HTTP service and CLI can
map failures without parsing messages.
"""


class WalletError(Exception):
    """Base class; `code` is a stable machine-readable identifier."""

    code = "error"

    def __init__(self, message: str = "", code: str | None = None):
        super().__init__(message or self.__class__.code)
        if code is not None:
            self.code = code


class ValidationError(WalletError):
    """Malformed input or precondition violation."""

    code = "invalid_request"


class MalformedDocumentError(WalletError):
    code = "malformed_document"


class CredentialsError(WalletError):
    """Uniform wrong-credential failure; never reveals which factor failed."""

    code = "invalid_credentials"


class InsufficientWitnessesError(CredentialsError):
    code = "threshold_not_met"


class StaleDocumentError(WalletError):
    """A time-window factor fell outside its stored range; the document must
    be refreshed through a login with a different factor subset."""

    code = "stale_document"


class UnknownFactorError(ValidationError):
    code = "unknown_factor"


class DuplicateFactorError(ValidationError):
    code = "duplicate_factor"


class AttestationError(WalletError):
    code = "invalid_attestation"


class StoreRejectedError(WalletError):
    code = "store_rejected"


class NotFoundError(WalletError):
    code = "not_found"


class LedgerRejectedError(WalletError):
    code = "ledger_rejected"


class InsufficientFundsError(LedgerRejectedError):
    code = "insufficient_funds"


class BadNonceError(LedgerRejectedError):
    code = "bad_nonce"


class BadSignatureError(LedgerRejectedError):
    code = "bad_signature"


class FaucetDisabledError(WalletError):
    code = "faucet_disabled"


class AuthenticationRequiredError(WalletError):
    code = "authentication_required"


class ChannelError(WalletError):
    code = "channel_error"
