"""Deterministic Ed25519 keypairs and 20-byte addresses.

Shared by document attestation and the mock ledger: both identify a wallet
by the first 20 bytes of SHA-256 over the raw verification key.
"""

import hashlib

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

ADDRESS_LEN = 20
VERIFY_KEY_LEN = 32


def keypair_from_seed(seed: bytes) -> tuple[Ed25519PrivateKey, bytes, bytes]:
    """Derive (signing key, raw verification key, address) from a 32-byte seed."""
    if len(seed) != 32:
        raise ValueError("seed must be 32 bytes")
    sk = Ed25519PrivateKey.from_private_bytes(seed)
    vk = sk.public_key().public_bytes_raw()
    return sk, vk, address_from_verify_key(vk)


def address_from_verify_key(vk: bytes) -> bytes:
    return hashlib.sha256(vk).digest()[:ADDRESS_LEN]


def sign(seed: bytes, message: bytes) -> bytes:
    sk, _, _ = keypair_from_seed(seed)
    return sk.sign(message)


def verify(vk: bytes, signature: bytes, message: bytes) -> bool:
    if len(vk) != VERIFY_KEY_LEN:
        return False
    try:
        Ed25519PublicKey.from_public_bytes(vk).verify(signature, message)
        return True
    except (InvalidSignature, ValueError):
        return False
