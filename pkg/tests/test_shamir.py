"""Shamir sharing checked against independent small-field oracles.

The reference field arithmetic below is bit-by-bit (no tables) and the
consistency oracle solves the Vandermonde system by Gaussian elimination,
so neither shares code with the implementation under test.
"""

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfwallet.mfkdf import shamir
from mfwallet.mfkdf.shamir import Share, combine_shares, share_at, split_secret


def ref_mul(a: int, b: int) -> int:
    """Russian-peasant multiply over GF(256) with the AES polynomial."""
    p = 0
    for _ in range(8):
        if b & 1:
            p ^= a
        hi = a & 0x80
        a = (a << 1) & 0xFF
        if hi:
            a ^= 0x1B
        b >>= 1
    return p


def ref_pow(a: int, e: int) -> int:
    r = 1
    for _ in range(e):
        r = ref_mul(r, a)
    return r


def ref_inv(a: int) -> int:
    # a^254 = a^-1 in GF(256)
    return ref_pow(a, 254)


def solve_poly_through(points: list[tuple[int, int]]) -> list[int] | None:
    """Gaussian elimination for coefficients of a degree-(len-1) polynomial
    through the given (x, y) points; None when the system is singular."""
    t = len(points)
    rows = [[ref_pow(x, j) for j in range(t)] + [y] for x, y in points]
    for col in range(t):
        pivot = next((r for r in range(col, t) if rows[r][col] != 0), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = ref_inv(rows[col][col])
        rows[col] = [ref_mul(v, inv) for v in rows[col]]
        for r in range(t):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [rv ^ ref_mul(factor, cv) for rv, cv in zip(rows[r], rows[col])]
    return [rows[i][t] for i in range(t)]


def ref_eval(coeffs: list[int], x: int) -> int:
    acc = 0
    for j, c in enumerate(coeffs):
        acc ^= ref_mul(c, ref_pow(x, j))
    return acc


def test_field_tables_match_reference():
    for a in range(256):
        for b in range(0, 256, 7):
            assert shamir.gf_mul(a, b) == ref_mul(a, b)
    for a in range(1, 256):
        assert shamir.gf_mul(a, shamir.gf_inv(a)) == 1
        assert shamir.gf_inv(a) == ref_inv(a)


def test_single_share_is_secret():
    secret = bytes(range(32))
    (share,) = split_secret(secret, 1, 1, rng=random.Random(0).randbytes)
    assert share.y == secret
    assert combine_shares([share], 1) == secret


def test_two_of_three_all_pairs():
    rng = random.Random(1).randbytes
    secret = random.Random(2).randbytes(32)
    shares = split_secret(secret, 2, 3, rng=rng)
    assert [s.x for s in shares] == [1, 2, 3]
    for pair in itertools.combinations(shares, 2):
        assert combine_shares(list(pair), 2) == secret


def test_combine_rejects_duplicates_and_shortfall():
    shares = split_secret(b"\x07" * 32, 2, 3, rng=random.Random(3).randbytes)
    with pytest.raises(ValueError):
        combine_shares([shares[0], shares[0]], 2)
    with pytest.raises(ValueError):
        combine_shares([shares[0]], 2)


def test_split_validates_parameters():
    with pytest.raises(ValueError):
        split_secret(b"\x00" * 32, 3, 2)
    with pytest.raises(ValueError):
        split_secret(b"\x00" * 32, 1, 256)
    with pytest.raises(ValueError):
        split_secret(b"\x00" * 32, 0, 1)


def test_reconstruction_matches_gaussian_oracle():
    rng = random.Random(4)
    for t, n in [(2, 3), (3, 5), (4, 6)]:
        secret = rng.randbytes(4)
        shares = split_secret(secret, t, n, rng=rng.randbytes)
        subset = rng.sample(shares, t)
        for pos in range(len(secret)):
            coeffs = solve_poly_through([(s.x, s.y[pos]) for s in subset])
            assert coeffs is not None
            assert coeffs[0] == secret[pos]
        assert combine_shares(subset, t) == secret


def test_privacy_single_byte_exhaustive():
    """With t-1 shares of a 1-byte secret, every candidate secret admits a
    polynomial through the observed points, for all n <= 5, t <= n."""
    rng = random.Random(5)
    for n in range(1, 6):
        for t in range(1, n + 1):
            secret = bytes([rng.randrange(256)])
            shares = split_secret(secret, t, n, rng=rng.randbytes)
            for partial in itertools.combinations(shares, t - 1):
                for candidate in range(256):
                    points = [(0, candidate)] + [(s.x, s.y[0]) for s in partial]
                    coeffs = solve_poly_through(points)
                    assert coeffs is not None
                    for s in partial:
                        assert ref_eval(coeffs, s.x) == s.y[0]


def test_all_subsets_reconstruct_one_byte_exhaustive():
    rng = random.Random(6)
    for n in range(1, 6):
        for t in range(1, n + 1):
            secret = bytes([rng.randrange(256)])
            shares = split_secret(secret, t, n, rng=rng.randbytes)
            for subset in itertools.combinations(shares, t):
                assert combine_shares(list(subset), t) == secret


def test_share_at_recovers_withheld_share():
    rng = random.Random(7)
    secret = rng.randbytes(32)
    shares = split_secret(secret, 3, 5, rng=rng.randbytes)
    regenerated = share_at(shares[:3], 3, 5)
    assert regenerated == shares[4]
    assert share_at(shares[1:4], 3, 1) == shares[0]


@settings(max_examples=40, deadline=None)
@given(
    data=st.data(),
    secret=st.binary(min_size=32, max_size=32),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_property_random_subsets_reconstruct(data, secret, seed):
    rng = random.Random(seed)
    n = data.draw(st.integers(min_value=1, max_value=10))
    t = data.draw(st.integers(min_value=1, max_value=n))
    shares = split_secret(secret, t, n, rng=rng.randbytes)
    subset = rng.sample(shares, t)
    assert combine_shares(subset, t) == secret
