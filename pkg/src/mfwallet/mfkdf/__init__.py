from .core import (
    DeriveResult,
    ReconfigureResult,
    SetupResult,
    attest,
    derive,
    policy_entropy,
    reconfigure_factor,
    setup,
    verify_attestation,
)
from .document import (
    Attestation,
    DerivedKey,
    FactorEntry,
    KdfConfig,
    PolicyDocument,
    canonical_serialize,
    parse,
    signing_bytes,
)
from .kdf import stretch_final
from .shamir import Share, combine_shares, share_at, split_secret

__all__ = [
    "DeriveResult",
    "ReconfigureResult",
    "SetupResult",
    "attest",
    "derive",
    "policy_entropy",
    "reconfigure_factor",
    "setup",
    "verify_attestation",
    "Attestation",
    "DerivedKey",
    "FactorEntry",
    "KdfConfig",
    "PolicyDocument",
    "canonical_serialize",
    "parse",
    "signing_bytes",
    "stretch_final",
    "Share",
    "combine_shares",
    "share_at",
    "split_secret",
]
