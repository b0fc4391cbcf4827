"""Shamir secret sharing over GF(256), byte-parallel.

A 32-byte secret is split as 32 independent polynomials, one per byte
position, using the AES field polynomial x^8 + x^4 + x^3 + x + 1. Share i
is the evaluation of every polynomial at x = i, so any t shares pin down
each degree-(t-1) polynomial and the secret is the evaluation at x = 0.
"""

import secrets
from dataclasses import dataclass
from typing import Sequence

from ..rng import Rng

_AES_POLY = 0x11B

# exp/log tables over the multiplicative group (generator 3)
_EXP = [0] * 512
_LOG = [0] * 256
_v = 1
for _i in range(255):
    _EXP[_i] = _v
    _LOG[_v] = _i
    _v ^= (_v << 1) ^ (_AES_POLY if _v & 0x80 else 0)
    _v &= 0xFF
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return _EXP[255 - _LOG[a]]


def gf_div(a: int, b: int) -> int:
    return gf_mul(a, gf_inv(b))


@dataclass(frozen=True)
class Share:
    """One evaluation point: x in [1, 255], y holds one byte per polynomial."""

    x: int
    y: bytes

    def __post_init__(self):
        if not 1 <= self.x <= 255:
            raise ValueError("share index must be in [1, 255]")


def _eval_poly(coeffs: Sequence[int], x: int) -> int:
    # Horner, highest degree first
    acc = 0
    for c in reversed(coeffs):
        acc = gf_mul(acc, x) ^ c
    return acc


def split_secret(secret: bytes, t: int, n: int, rng: Rng = secrets.token_bytes) -> list[Share]:
    """Split `secret` into n shares, any t of which reconstruct it."""
    if not 1 <= t <= n:
        raise ValueError("need 1 <= t <= n")
    if n > 255:
        raise ValueError("at most 255 shares")
    coeff_rows = []
    for j in range(len(secret)):
        coeffs = [secret[j]] + list(rng(t - 1))
        coeff_rows.append(coeffs)
    shares = []
    for x in range(1, n + 1):
        y = bytes(_eval_poly(coeffs, x) for coeffs in coeff_rows)
        shares.append(Share(x=x, y=y))
    return shares


def _check_shares(shares: Sequence[Share], t: int) -> None:
    if len(shares) < t:
        raise ValueError(f"need at least {t} shares, got {len(shares)}")
    xs = [s.x for s in shares]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate share indices")
    lengths = {len(s.y) for s in shares}
    if len(lengths) != 1:
        raise ValueError("shares have mismatched lengths")


def interpolate_at(shares: Sequence[Share], x: int) -> bytes:
    """Lagrange-interpolate the share polynomials at an arbitrary point x."""
    out = bytearray(len(shares[0].y))
    for j, sj in enumerate(shares):
        num, den = 1, 1
        for m, sm in enumerate(shares):
            if m == j:
                continue
            num = gf_mul(num, x ^ sm.x)
            den = gf_mul(den, sj.x ^ sm.x)
        lj = gf_div(num, den)
        for k in range(len(out)):
            out[k] ^= gf_mul(sj.y[k], lj)
    return bytes(out)


def combine_shares(shares: Sequence[Share], t: int) -> bytes:
    """Recover the secret (polynomial value at x = 0) from >= t shares."""
    _check_shares(shares, t)
    return interpolate_at(list(shares)[:t], 0)


def share_at(shares: Sequence[Share], t: int, x: int) -> Share:
    """Re-derive the share for index x from any t known shares."""
    _check_shares(shares, t)
    if not 1 <= x <= 255:
        raise ValueError("share index must be in [1, 255]")
    return Share(x=x, y=interpolate_at(list(shares)[:t], x))
