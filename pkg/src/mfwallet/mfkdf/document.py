"""Policy document: the public material needed to re-derive a wallet key.

Everything here is safe to publish. Witness-guarded Shamir shares sit in
AEAD ciphertexts, dynamic-factor inner material is wrapped under a key only
derivable with the wallet key itself, and the whole document is signed so
peers can tie it to an on-chain address.

Canonical form is UTF-8 JSON with lexicographically sorted keys, no
insignificant whitespace, binary fields base64url, addresses lowercase hex.
Absent optional fields are omitted entirely, so two equal documents always
serialize to identical bytes.
"""

import base64
import hashlib
import json
from dataclasses import dataclass, field, replace

from ..errors import MalformedDocumentError, ValidationError

SCHEMA_VERSION = 1
MAX_FACTORS = 16

FACTOR_TYPES = frozenset(
    {"password", "hotp", "totp", "ooba", "hmac_token", "recovery_code"}
)


def b64e(raw: bytes) -> str:
    return base64.urlsafe_b64encode(raw).decode("ascii")


def b64d(text: str) -> bytes:
    try:
        return base64.urlsafe_b64decode(text.encode("ascii"))
    except Exception as exc:
        raise MalformedDocumentError(f"bad base64 field: {exc}") from exc


@dataclass(frozen=True)
class KdfConfig:
    """Memory-hard stretch parameters; `test` profile is an explicit opt-in."""

    memory_cost_kib: int = 65536
    time_cost: int = 3
    parallelism: int = 4
    output_len: int = 32
    profile: str = "production"

    MIN_PRODUCTION_MEMORY_KIB = 8192

    @classmethod
    def production(cls) -> "KdfConfig":
        return cls()

    @classmethod
    def test(cls) -> "KdfConfig":
        return cls(memory_cost_kib=64, time_cost=1, parallelism=1, profile="test")

    def validate(self) -> None:
        if self.profile not in ("production", "test"):
            raise ValidationError(f"unknown kdf profile {self.profile!r}")
        if self.output_len != 32:
            raise ValidationError("kdf output length must be 32 bytes")
        if self.time_cost < 1 or self.parallelism < 1:
            raise ValidationError("kdf time cost and parallelism must be >= 1")
        if self.memory_cost_kib < 8 * self.parallelism:
            raise ValidationError("kdf memory cost too small for lane count")
        if self.profile == "production" and self.memory_cost_kib < self.MIN_PRODUCTION_MEMORY_KIB:
            raise ValidationError(
                f"production profile requires >= {self.MIN_PRODUCTION_MEMORY_KIB} KiB memory cost"
            )

    def to_json(self) -> dict:
        return {
            "memory_cost_kib": self.memory_cost_kib,
            "time_cost": self.time_cost,
            "parallelism": self.parallelism,
            "output_len": self.output_len,
            "profile": self.profile,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KdfConfig":
        try:
            cfg = cls(
                memory_cost_kib=int(obj["memory_cost_kib"]),
                time_cost=int(obj["time_cost"]),
                parallelism=int(obj["parallelism"]),
                output_len=int(obj["output_len"]),
                profile=str(obj["profile"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocumentError(f"bad kdf config: {exc}") from exc
        cfg.validate()
        return cfg


@dataclass(frozen=True)
class FactorEntry:
    factor_id: str
    factor_type: str
    share_index: int
    encrypted_share: bytes
    factor_salt: bytes
    public_params: dict
    entropy_bits: float

    def to_json(self) -> dict:
        return {
            "factor_id": self.factor_id,
            "factor_type": self.factor_type,
            "share_index": self.share_index,
            "encrypted_share": b64e(self.encrypted_share),
            "factor_salt": b64e(self.factor_salt),
            "public_params": self.public_params,
            "entropy_bits": float(self.entropy_bits),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FactorEntry":
        try:
            entry = cls(
                factor_id=str(obj["factor_id"]),
                factor_type=str(obj["factor_type"]),
                share_index=int(obj["share_index"]),
                encrypted_share=b64d(obj["encrypted_share"]),
                factor_salt=b64d(obj["factor_salt"]),
                public_params=dict(obj["public_params"]),
                entropy_bits=float(obj["entropy_bits"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedDocumentError(f"bad factor entry: {exc}") from exc
        if entry.factor_type not in FACTOR_TYPES:
            raise MalformedDocumentError(f"unknown factor type {entry.factor_type!r}")
        if not 1 <= entry.share_index <= 255:
            raise MalformedDocumentError("share index out of range")
        if len(entry.factor_salt) != 32:
            raise MalformedDocumentError("factor salt must be 32 bytes")
        if not entry.factor_id:
            raise MalformedDocumentError("empty factor id")
        return entry


@dataclass(frozen=True)
class Attestation:
    verification_key: bytes
    signature: bytes

    def to_json(self) -> dict:
        return {
            "verification_key": b64e(self.verification_key),
            "signature": b64e(self.signature),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Attestation":
        try:
            return cls(
                verification_key=b64d(obj["verification_key"]),
                signature=b64d(obj["signature"]),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedDocumentError(f"bad attestation: {exc}") from exc


@dataclass(frozen=True)
class DerivedKey:
    """Static key material and its domain-separated subkeys.

    `sigma` is never serialized; the signing seed feeds wallet keypair
    derivation and the wrap key seals factor inner material.
    """

    sigma: bytes = field(repr=False)
    signing_seed: bytes = field(repr=False)
    wrap_key: bytes = field(repr=False)

    @classmethod
    def from_sigma(cls, sigma: bytes) -> "DerivedKey":
        if len(sigma) != 32:
            raise ValidationError("sigma must be 32 bytes")
        return cls(
            sigma=sigma,
            signing_seed=hashlib.sha256(b"mfkdf/sign" + sigma).digest(),
            wrap_key=hashlib.sha256(b"mfkdf/wrap" + sigma).digest(),
        )


@dataclass(frozen=True)
class PolicyDocument:
    version: int
    threshold_t: int
    wallet_address: bytes
    global_salt: bytes
    kdf_config: KdfConfig
    factors: tuple[FactorEntry, ...]
    wrapped_inner_secrets: dict[str, bytes]
    wrapped_master: bytes
    identifier_hash: bytes | None = None
    attestation: Attestation | None = None
    schema_version: int = SCHEMA_VERSION

    def validate(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise MalformedDocumentError(
                f"unsupported schema version {self.schema_version}"
            )
        if self.version < 1:
            raise MalformedDocumentError("version must be >= 1")
        if not 1 <= self.threshold_t <= len(self.factors) <= MAX_FACTORS:
            raise MalformedDocumentError(
                "need 1 <= threshold <= factor count <= %d" % MAX_FACTORS
            )
        ids = [f.factor_id for f in self.factors]
        if len(set(ids)) != len(ids):
            raise MalformedDocumentError("duplicate factor ids")
        if len(self.wallet_address) != 20:
            raise MalformedDocumentError("wallet address must be 20 bytes")
        if len(self.global_salt) != 32:
            raise MalformedDocumentError("global salt must be 32 bytes")
        if self.identifier_hash is not None and len(self.identifier_hash) != 32:
            raise MalformedDocumentError("identifier hash must be 32 bytes")
        if set(self.wrapped_inner_secrets) != set(ids):
            raise MalformedDocumentError("wrapped secrets must cover every factor")
        indices = [f.share_index for f in self.factors]
        if len(set(indices)) != len(indices):
            raise MalformedDocumentError("duplicate share indices")
        self.kdf_config.validate()

    def entry(self, factor_id: str) -> FactorEntry:
        for f in self.factors:
            if f.factor_id == factor_id:
                return f
        raise MalformedDocumentError(f"no factor {factor_id!r} in document")

    def with_attestation(self, attestation: Attestation | None) -> "PolicyDocument":
        return replace(self, attestation=attestation)

    def to_json(self) -> dict:
        obj = {
            "schema_version": self.schema_version,
            "version": self.version,
            "threshold_t": self.threshold_t,
            "wallet_address": self.wallet_address.hex(),
            "global_salt": b64e(self.global_salt),
            "kdf_config": self.kdf_config.to_json(),
            "factors": [f.to_json() for f in self.factors],
            "wrapped_inner_secrets": {
                k: b64e(v) for k, v in self.wrapped_inner_secrets.items()
            },
            "wrapped_master": b64e(self.wrapped_master),
        }
        if self.identifier_hash is not None:
            obj["identifier_hash"] = b64e(self.identifier_hash)
        if self.attestation is not None:
            obj["attestation"] = self.attestation.to_json()
        return obj


def canonical_serialize(doc: PolicyDocument) -> bytes:
    doc.validate()
    return _dumps(doc.to_json())


def signing_bytes(doc: PolicyDocument) -> bytes:
    """Serialization the attestation signs: the document minus the attestation."""
    return canonical_serialize(doc.with_attestation(None))


def _dumps(obj: dict) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode("utf-8")


def parse(data: bytes) -> PolicyDocument:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedDocumentError(f"not canonical JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedDocumentError("document must be a JSON object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise MalformedDocumentError(
            f"unsupported schema version {obj.get('schema_version')!r}"
        )
    try:
        address = bytes.fromhex(obj["wallet_address"])
        doc = PolicyDocument(
            version=int(obj["version"]),
            threshold_t=int(obj["threshold_t"]),
            wallet_address=address,
            global_salt=b64d(obj["global_salt"]),
            kdf_config=KdfConfig.from_json(obj["kdf_config"]),
            factors=tuple(FactorEntry.from_json(f) for f in obj["factors"]),
            wrapped_inner_secrets={
                str(k): b64d(v) for k, v in obj["wrapped_inner_secrets"].items()
            },
            wrapped_master=b64d(obj["wrapped_master"]),
            identifier_hash=(
                b64d(obj["identifier_hash"]) if "identifier_hash" in obj else None
            ),
            attestation=(
                Attestation.from_json(obj["attestation"])
                if "attestation" in obj
                else None
            ),
        )
    except MalformedDocumentError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDocumentError(f"bad document: {exc}") from exc
    doc.validate()
    return doc
