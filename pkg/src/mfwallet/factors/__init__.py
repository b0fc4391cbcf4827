from .channel import MockInbox, OutOfBandChannel
from .otp import hotp_code, totp_code, totp_counter
from .suite import (
    DEFAULT_OTP_DIGITS,
    DEFAULT_TOTP_STEP,
    DEFAULT_TOTP_WINDOW,
    FactorContext,
    FactorMaterial,
    FactorSetupSpec,
    FactorUpdate,
    HmacTokenSpec,
    HotpSpec,
    OobaSpec,
    PasswordSpec,
    RecoveryCodeSpec,
    TotpSpec,
    derive_target,
    otp_entropy_bits,
    setup_factor,
    update_factor,
)
from .token import SimulatedToken, token_respond

__all__ = [
    "MockInbox",
    "OutOfBandChannel",
    "hotp_code",
    "totp_code",
    "totp_counter",
    "DEFAULT_OTP_DIGITS",
    "DEFAULT_TOTP_STEP",
    "DEFAULT_TOTP_WINDOW",
    "FactorContext",
    "FactorMaterial",
    "FactorSetupSpec",
    "FactorUpdate",
    "HmacTokenSpec",
    "HotpSpec",
    "OobaSpec",
    "PasswordSpec",
    "RecoveryCodeSpec",
    "TotpSpec",
    "derive_target",
    "otp_entropy_bits",
    "setup_factor",
    "update_factor",
    "SimulatedToken",
    "token_respond",
]
