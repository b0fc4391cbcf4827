"""Key stretching and the AEAD envelope guarding shares and inner material.

Share keys are fast HKDF outputs of the factor's witness-target; the master
secret goes through a memory-hard Argon2id stretch, so guessing attacks pay
both the per-factor entropy and the stretch cost.
"""

import secrets

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.argon2 import Argon2id
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..errors import CredentialsError
from .document import KdfConfig
from ..rng import Rng

NONCE_LEN = 12


def stretch_final(secret: bytes, salt: bytes, cfg: KdfConfig) -> bytes:
    """Memory-hard stretch of the combined secret into the static key sigma."""
    cfg.validate()
    return Argon2id(
        salt=salt,
        length=cfg.output_len,
        iterations=cfg.time_cost,
        lanes=cfg.parallelism,
        memory_cost=cfg.memory_cost_kib,
    ).derive(secret)


def share_key(target: bytes, factor_salt: bytes) -> bytes:
    """Key that guards one factor's share, derived from its witness-target."""
    return HKDF(
        algorithm=SHA256(), length=32, salt=factor_salt, info=b"mfkdf/share-key"
    ).derive(target)


def seal(key: bytes, plaintext: bytes, aad: bytes, rng: Rng = secrets.token_bytes) -> bytes:
    nonce = rng(NONCE_LEN)
    return nonce + AESGCM(key).encrypt(nonce, plaintext, aad)


def open_sealed(key: bytes, blob: bytes, aad: bytes) -> bytes:
    """Decrypt an envelope; authentication failure means a wrong key/witness."""
    if len(blob) < NONCE_LEN + 16:
        raise CredentialsError("sealed blob too short")
    try:
        return AESGCM(key).decrypt(blob[:NONCE_LEN], blob[NONCE_LEN:], aad)
    except InvalidTag:
        raise CredentialsError("authentication failed") from None


def share_aad(factor_id: str) -> bytes:
    return b"mfkdf/share/v1:" + factor_id.encode("utf-8")


def inner_aad(factor_id: str) -> bytes:
    return b"mfkdf/inner/v1:" + factor_id.encode("utf-8")


MASTER_AAD = b"mfkdf/master/v1"
