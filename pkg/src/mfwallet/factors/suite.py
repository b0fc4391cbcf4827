"""The six authentication factors behind threshold key derivation.

Each factor maps a login-time witness onto a stable witness-target, the
value that keys the AEAD decryption of that factor's share:

  password / recovery_code  target is the witness itself
  hotp / totp               a published offset maps the one-time code onto a
                            fixed random target, re-offset after each login
  ooba                      the target is the code most recently sent over
                            the side channel, re-issued after each login
  hmac_token                the target is the HMAC response to the currently
                            published challenge, re-challenged each login
"""

import base64
import hashlib
import hmac
import math
import re
import struct
import time
import uuid
from dataclasses import dataclass, field

from ..errors import ChannelError, CredentialsError, StaleDocumentError, ValidationError
from ..rng import Rng
from .channel import OutOfBandChannel
from .otp import hotp_code, totp_counter
from .token import RESPONSE_LEN

DEFAULT_OTP_DIGITS = 6
DEFAULT_TOTP_STEP = 30
DEFAULT_TOTP_WINDOW = 32768

PASSWORD_ENTROPY_BITS = 40.0
RECOVERY_CODE_ENTROPY_BITS = 122.0
HMAC_TOKEN_ENTROPY_BITS = 160.0

_EMAIL_RE = re.compile(r"^[^@\s]+@[^@\s]+\.[^@\s]+$")


@dataclass
class FactorContext:
    """Ambient inputs a factor may need: clock, OOBA channel, entropy."""

    rng: Rng
    unix_time: int | None = None
    channel: OutOfBandChannel | None = None

    def now(self) -> int:
        return int(time.time()) if self.unix_time is None else self.unix_time


@dataclass(frozen=True)
class PasswordSpec:
    factor_id: str
    password: str = field(repr=False)
    entropy_bits: float = PASSWORD_ENTROPY_BITS
    factor_type = "password"


@dataclass(frozen=True)
class HotpSpec:
    factor_id: str
    digits: int = DEFAULT_OTP_DIGITS
    key: bytes | None = field(default=None, repr=False)
    factor_type = "hotp"


@dataclass(frozen=True)
class TotpSpec:
    factor_id: str
    digits: int = DEFAULT_OTP_DIGITS
    step_seconds: int = DEFAULT_TOTP_STEP
    window: int = DEFAULT_TOTP_WINDOW
    key: bytes | None = field(default=None, repr=False)
    factor_type = "totp"


@dataclass(frozen=True)
class OobaSpec:
    factor_id: str
    email: str
    digits: int = DEFAULT_OTP_DIGITS
    factor_type = "ooba"


@dataclass(frozen=True)
class HmacTokenSpec:
    factor_id: str
    secret: bytes | None = field(default=None, repr=False)
    factor_type = "hmac_token"


@dataclass(frozen=True)
class RecoveryCodeSpec:
    factor_id: str
    code: str | None = field(default=None, repr=False)
    factor_type = "recovery_code"


FactorSetupSpec = (
    PasswordSpec | HotpSpec | TotpSpec | OobaSpec | HmacTokenSpec | RecoveryCodeSpec
)


@dataclass
class FactorMaterial:
    """Everything setup produces for one factor.

    `target` keys the share envelope; `inner_secret` is the non-public state
    (OTP key, token secret) that the derived key later unwraps to refresh
    public parameters; `disclosures` is shown to the user exactly once.
    """

    public_params: dict
    target: bytes
    inner_secret: bytes | None
    entropy_bits: float
    disclosures: dict


@dataclass
class FactorUpdate:
    public_params: dict
    target: bytes
    inner_secret: bytes | None


def otp_entropy_bits(digits: int) -> float:
    return math.log2(10**digits)


def _check_digits(digits: int) -> None:
    if not 4 <= digits <= 9:
        raise ValidationError("OTP digits must be in [4, 9]")


def _random_code(rng: Rng, digits: int) -> int:
    return int.from_bytes(rng(8), "big") % 10**digits


def _code_bytes(value: int, digits: int) -> bytes:
    return str(value).zfill(digits).encode("ascii")


def _parse_code(witness: bytes, digits: int) -> int:
    text = witness.decode("ascii", errors="replace").strip()
    if not text.isdigit() or len(text) != digits:
        raise CredentialsError("malformed one-time code")
    return int(text)


def pack_offsets(offsets: list[int]) -> str:
    return base64.urlsafe_b64encode(
        struct.pack(f">{len(offsets)}I", *offsets)
    ).decode("ascii")


def unpack_offsets(packed: str) -> list[int]:
    raw = base64.urlsafe_b64decode(packed.encode("ascii"))
    return list(struct.unpack(f">{len(raw) // 4}I", raw))


def _hotp_offsets(key: bytes, target: int, start: int, count: int, digits: int) -> list[int]:
    mod = 10**digits
    return [
        (target - int(hotp_code(key, start + i, digits))) % mod for i in range(count)
    ]


def canonical_recovery_code(code: str) -> str:
    try:
        return str(uuid.UUID(code.strip()))
    except ValueError as exc:
        raise ValidationError(f"recovery code is not a UUID: {exc}") from exc


def setup_factor(spec: FactorSetupSpec, ctx: FactorContext) -> FactorMaterial:
    if isinstance(spec, PasswordSpec):
        if not spec.password:
            raise ValidationError("password must not be empty")
        return FactorMaterial(
            public_params={},
            target=spec.password.encode("utf-8"),
            inner_secret=None,
            entropy_bits=float(spec.entropy_bits),
            disclosures={},
        )

    if isinstance(spec, RecoveryCodeSpec):
        if spec.code is not None:
            code = canonical_recovery_code(spec.code)
        else:
            code = str(uuid.UUID(bytes=ctx.rng(16), version=4))
        return FactorMaterial(
            public_params={},
            target=code.encode("utf-8"),
            inner_secret=None,
            entropy_bits=RECOVERY_CODE_ENTROPY_BITS,
            disclosures={"recovery_code": code},
        )

    if isinstance(spec, HotpSpec):
        _check_digits(spec.digits)
        key = spec.key if spec.key is not None else ctx.rng(20)
        if len(key) < 16:
            raise ValidationError("HOTP key must be at least 16 bytes")
        counter = 0
        target = _random_code(ctx.rng, spec.digits)
        offset = _hotp_offsets(key, target, counter, 1, spec.digits)[0]
        return FactorMaterial(
            public_params={"counter": counter, "digits": spec.digits, "offset": offset},
            target=_code_bytes(target, spec.digits),
            inner_secret=key,
            entropy_bits=otp_entropy_bits(spec.digits),
            disclosures={"otp_key_hex": key.hex(), "counter": counter, "digits": spec.digits},
        )

    if isinstance(spec, TotpSpec):
        _check_digits(spec.digits)
        if spec.step_seconds <= 0:
            raise ValidationError("TOTP step must be positive")
        if spec.window < 1:
            raise ValidationError("TOTP window must be at least 1")
        key = spec.key if spec.key is not None else ctx.rng(20)
        if len(key) < 16:
            raise ValidationError("TOTP key must be at least 16 bytes")
        start = totp_counter(ctx.now(), spec.step_seconds)
        target = _random_code(ctx.rng, spec.digits)
        offsets = _hotp_offsets(key, target, start, spec.window, spec.digits)
        return FactorMaterial(
            public_params={
                "start_counter": start,
                "step_seconds": spec.step_seconds,
                "digits": spec.digits,
                "window_offsets": pack_offsets(offsets),
            },
            target=_code_bytes(target, spec.digits),
            inner_secret=key,
            entropy_bits=otp_entropy_bits(spec.digits),
            disclosures={
                "otp_key_hex": key.hex(),
                "digits": spec.digits,
                "step_seconds": spec.step_seconds,
            },
        )

    if isinstance(spec, OobaSpec):
        _check_digits(spec.digits)
        email = spec.email.strip().lower()
        if not _EMAIL_RE.match(email):
            raise ValidationError(f"not a valid email address: {spec.email!r}")
        if ctx.channel is None:
            raise ChannelError("OOBA factor requires an out-of-band channel")
        code = _random_code(ctx.rng, spec.digits)
        code_text = str(code).zfill(spec.digits)
        ctx.channel.send(email, code_text)
        return FactorMaterial(
            public_params={"channel_address": email, "digits": spec.digits, "code_epoch": 0},
            target=code_text.encode("ascii"),
            inner_secret=None,
            entropy_bits=otp_entropy_bits(spec.digits),
            disclosures={},
        )

    if isinstance(spec, HmacTokenSpec):
        generated = spec.secret is None
        secret = spec.secret if spec.secret is not None else ctx.rng(20)
        if len(secret) != 20:
            raise ValidationError("token secret must be 20 bytes")
        challenge = ctx.rng(64)
        response = hmac.new(secret, challenge, hashlib.sha1).digest()
        return FactorMaterial(
            public_params={"challenge": base64.urlsafe_b64encode(challenge).decode("ascii")},
            target=response,
            inner_secret=secret,
            entropy_bits=HMAC_TOKEN_ENTROPY_BITS,
            disclosures={"token_secret_hex": secret.hex()} if generated else {},
        )

    raise ValidationError(f"unknown factor spec {type(spec).__name__}")


def derive_target(
    factor_type: str, params: dict, witness: bytes, ctx: FactorContext
) -> bytes:
    """Map a presented witness onto the factor's witness-target bytes.

    No correctness judgment happens here; a wrong witness simply produces a
    target that fails AEAD decryption of the share downstream.
    """
    if factor_type == "password":
        if not witness:
            raise CredentialsError("empty password witness")
        return witness

    if factor_type == "recovery_code":
        try:
            code = canonical_recovery_code(witness.decode("utf-8", errors="replace"))
        except ValidationError:
            raise CredentialsError("malformed recovery code") from None
        return code.encode("utf-8")

    if factor_type == "hotp":
        digits = int(params["digits"])
        value = _parse_code(witness, digits)
        target = (value + int(params["offset"])) % 10**digits
        return _code_bytes(target, digits)

    if factor_type == "totp":
        digits = int(params["digits"])
        step = int(params["step_seconds"])
        value = _parse_code(witness, digits)
        offsets = unpack_offsets(params["window_offsets"])
        index = totp_counter(ctx.now(), step) - int(params["start_counter"])
        if not 0 <= index < len(offsets):
            raise StaleDocumentError(
                "time-based code window exhausted; log in with another factor "
                "set to refresh the document"
            )
        target = (value + offsets[index]) % 10**digits
        return _code_bytes(target, digits)

    if factor_type == "ooba":
        digits = int(params["digits"])
        return _code_bytes(_parse_code(witness, digits), digits)

    if factor_type == "hmac_token":
        if len(witness) != RESPONSE_LEN:
            raise CredentialsError("token response must be 20 bytes")
        return witness

    raise ValidationError(f"unknown factor type {factor_type!r}")


def update_factor(
    factor_type: str,
    params: dict,
    target: bytes,
    inner_secret: bytes | None,
    used: bool,
    ctx: FactorContext,
) -> FactorUpdate:
    """Feed-forward step after a successful derivation.

    Static factors pass through unchanged. HOTP advances its counter only
    when the factor was actually consumed, otherwise the user's authenticator
    would fall out of sync with the published offset.
    """
    if factor_type in ("password", "recovery_code"):
        return FactorUpdate(public_params=params, target=target, inner_secret=None)

    if factor_type == "hotp":
        digits = int(params["digits"])
        counter = int(params["counter"]) + (1 if used else 0)
        offset = _hotp_offsets(inner_secret, int(target), counter, 1, digits)[0]
        return FactorUpdate(
            public_params={"counter": counter, "digits": digits, "offset": offset},
            target=target,
            inner_secret=inner_secret,
        )

    if factor_type == "totp":
        digits = int(params["digits"])
        step = int(params["step_seconds"])
        window = len(unpack_offsets(params["window_offsets"]))
        start = totp_counter(ctx.now(), step)
        offsets = _hotp_offsets(inner_secret, int(target), start, window, digits)
        return FactorUpdate(
            public_params={
                "start_counter": start,
                "step_seconds": step,
                "digits": digits,
                "window_offsets": pack_offsets(offsets),
            },
            target=target,
            inner_secret=inner_secret,
        )

    if factor_type == "ooba":
        digits = int(params["digits"])
        if ctx.channel is None:
            raise ChannelError("OOBA factor requires an out-of-band channel")
        code = _random_code(ctx.rng, digits)
        code_text = str(code).zfill(digits)
        ctx.channel.send(params["channel_address"], code_text)
        return FactorUpdate(
            public_params={
                "channel_address": params["channel_address"],
                "digits": digits,
                "code_epoch": int(params["code_epoch"]) + 1,
            },
            target=code_text.encode("ascii"),
            inner_secret=None,
        )

    if factor_type == "hmac_token":
        challenge = ctx.rng(64)
        response = hmac.new(inner_secret, challenge, hashlib.sha1).digest()
        return FactorUpdate(
            public_params={
                "challenge": base64.urlsafe_b64encode(challenge).decode("ascii")
            },
            target=response,
            inner_secret=inner_secret,
        )

    raise ValidationError(f"unknown factor type {factor_type!r}")
