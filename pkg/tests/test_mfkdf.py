"""Threshold derivation: subset independence, soundness, feed-forward,
reconfiguration, entropy floor, attestation."""

import base64
import itertools
import random

import pytest

from mfwallet.errors import (
    CredentialsError,
    DuplicateFactorError,
    InsufficientWitnessesError,
    UnknownFactorError,
    ValidationError,
)
from mfwallet.factors import (
    HmacTokenSpec,
    HotpSpec,
    MockInbox,
    OobaSpec,
    PasswordSpec,
    RecoveryCodeSpec,
    SimulatedToken,
    TotpSpec,
    hotp_code,
    totp_code,
)
from mfwallet.mfkdf import (
    KdfConfig,
    attest,
    canonical_serialize,
    derive,
    parse,
    policy_entropy,
    reconfigure_factor,
    setup,
    verify_attestation,
)

CFG = KdfConfig.test()
NOW = 1_700_000_000


class WitnessBox:
    """Tracks the client-side state needed to answer each factor type."""

    def __init__(self, result, inbox):
        self.inbox = inbox
        self.passwords = {}
        self.recovery = {}
        self.otp_keys = {}
        self.tokens = {}
        for fid, info in result.disclosures.items():
            if "recovery_code" in info:
                self.recovery[fid] = info["recovery_code"]
            elif "otp_key_hex" in info:
                self.otp_keys[fid] = bytes.fromhex(info["otp_key_hex"])
            elif "token_secret_hex" in info:
                self.tokens[fid] = SimulatedToken(bytes.fromhex(info["token_secret_hex"]))

    def witness(self, doc, factor_id, now=NOW):
        entry = doc.entry(factor_id)
        params = entry.public_params
        if entry.factor_type == "password":
            return self.passwords[factor_id].encode()
        if entry.factor_type == "recovery_code":
            return self.recovery[factor_id].encode()
        if entry.factor_type == "hotp":
            return hotp_code(self.otp_keys[factor_id], params["counter"], params["digits"]).encode()
        if entry.factor_type == "totp":
            return totp_code(
                self.otp_keys[factor_id], now, params["step_seconds"], params["digits"]
            ).encode()
        if entry.factor_type == "ooba":
            return self.inbox.latest(params["channel_address"]).encode()
        if entry.factor_type == "hmac_token":
            challenge = base64.urlsafe_b64decode(params["challenge"])
            return self.tokens[factor_id].respond(challenge)
        raise AssertionError(entry.factor_type)

    def wrong_witness(self, doc, factor_id):
        entry = doc.entry(factor_id)
        if entry.factor_type == "hmac_token":
            return b"\x00" * 20
        if entry.factor_type == "recovery_code":
            return b"00000000-0000-4000-8000-000000000000"
        if entry.factor_type in ("hotp", "totp", "ooba"):
            good = self.witness(doc, factor_id)
            flipped = str((int(good) + 1) % 10 ** entry.public_params["digits"])
            return flipped.zfill(entry.public_params["digits"]).encode()
        return b"definitely wrong"


def default_setup(seed=0, t=2):
    rng = random.Random(seed).randbytes
    inbox = MockInbox()
    result = setup(
        [
            PasswordSpec("password", "hunter2"),
            HmacTokenSpec("yubikey"),
            RecoveryCodeSpec("recovery"),
        ],
        t,
        CFG,
        rng,
        channel=inbox,
        unix_time=NOW,
    )
    box = WitnessBox(result, inbox)
    box.passwords["password"] = "hunter2"
    return result, box, inbox, rng


def test_default_policy_shape():
    result, _, _, _ = default_setup()
    doc = result.document
    assert doc.version == 1
    assert doc.threshold_t == 2
    assert len(doc.factors) == 3
    assert {f.factor_type for f in doc.factors} == {"password", "hmac_token", "recovery_code"}


def test_entropy_floor_default_policy():
    result, _, _, _ = default_setup()
    assert policy_entropy(result.document) == 162.0


def test_entropy_matches_subset_enumeration_oracle():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(1, 8)
        t = rng.randint(1, n)
        bits = [rng.uniform(1, 200) for _ in range(n)]
        oracle = min(sum(c) for c in itertools.combinations(bits, t))
        computed = sum(sorted(bits)[:t])
        assert computed == pytest.approx(oracle)


def test_entropy_otp_pair():
    import math

    rng = random.Random(12).randbytes
    result = setup(
        [HotpSpec("h"), TotpSpec("t", window=4), PasswordSpec("p", "x")],
        2,
        CFG,
        rng,
        unix_time=NOW,
    )
    expected = 2 * math.log2(10**6)
    assert policy_entropy(result.document) == pytest.approx(expected)
    assert policy_entropy(result.document) == pytest.approx(39.86, abs=0.01)


def test_single_password_factor_identity():
    rng = random.Random(13).randbytes
    result = setup([PasswordSpec("pw", "only")], 1, CFG, rng)
    out = derive(result.document, {"pw": b"only"}, rng)
    assert out.key.sigma == result.key.sigma


def test_fresh_rng_gives_distinct_sigmas_and_salts():
    sigmas, salts = set(), set()
    for seed in range(100):
        rng = random.Random(1000 + seed).randbytes
        result = setup([PasswordSpec("pw", "same password")], 1, CFG, rng)
        sigmas.add(result.key.sigma)
        salts.add(result.document.global_salt)
    assert len(sigmas) == 100
    assert len(salts) == 100


def test_any_two_of_three_derive_same_sigma():
    result, box, _, rng = default_setup()
    doc = result.document
    for pair in itertools.combinations(["password", "yubikey", "recovery"], 2):
        witnesses = {fid: box.witness(doc, fid) for fid in pair}
        out = derive(doc, witnesses, rng, unix_time=NOW)
        assert out.key.sigma == result.key.sigma
        assert out.document.version == doc.version + 1


def test_one_wrong_witness_fails_every_pair():
    result, box, _, rng = default_setup()
    doc = result.document
    ids = ["password", "yubikey", "recovery"]
    for wrong in ids:
        for other in ids:
            if other == wrong:
                continue
            witnesses = {
                wrong: box.wrong_witness(doc, wrong),
                other: box.witness(doc, other),
            }
            with pytest.raises(CredentialsError):
                derive(doc, witnesses, rng, unix_time=NOW)


def test_insufficient_witnesses_rejected():
    result, box, _, rng = default_setup()
    doc = result.document
    with pytest.raises(InsufficientWitnessesError):
        derive(doc, {"password": box.witness(doc, "password")}, rng, unix_time=NOW)


def test_unknown_witness_rejected():
    result, box, _, rng = default_setup()
    doc = result.document
    witnesses = {
        "password": box.witness(doc, "password"),
        "nonexistent": b"zzz",
    }
    with pytest.raises(UnknownFactorError):
        derive(doc, witnesses, rng, unix_time=NOW)


def test_setup_validation():
    rng = random.Random(14).randbytes
    with pytest.raises(ValidationError):
        setup([PasswordSpec("pw", "x")], 2, CFG, rng)
    with pytest.raises(DuplicateFactorError):
        setup([PasswordSpec("a", "x"), PasswordSpec("a", "y")], 1, CFG, rng)
    with pytest.raises(ValidationError):
        setup([], 1, CFG, rng)


def test_feed_forward_chain_20_logins():
    result, box, inbox, rng = default_setup()
    doc = result.document
    for i in range(20):
        pair = [["password", "yubikey"], ["recovery", "yubikey"], ["password", "recovery"]][i % 3]
        witnesses = {fid: box.witness(doc, fid) for fid in pair}
        out = derive(doc, witnesses, rng, channel=inbox, unix_time=NOW + i)
        assert out.key.sigma == result.key.sigma
        assert out.document.version == 2 + i
        doc = out.document


def test_feed_forward_rotates_challenge_and_code():
    rng = random.Random(15).randbytes
    inbox = MockInbox()
    result = setup(
        [PasswordSpec("pw", "x"), OobaSpec("mail", "a@b.co"), HmacTokenSpec("tok")],
        2,
        CFG,
        rng,
        channel=inbox,
        unix_time=NOW,
    )
    doc = result.document
    old_code = inbox.latest("a@b.co")
    old_challenge = doc.entry("tok").public_params["challenge"]

    out = derive(doc, {"pw": b"x", "mail": old_code.encode()}, rng, channel=inbox, unix_time=NOW)
    assert out.key.sigma == result.key.sigma
    new_doc = out.document
    assert inbox.latest("a@b.co") != old_code
    assert new_doc.entry("tok").public_params["challenge"] != old_challenge

    # the old code no longer works against the refreshed document
    with pytest.raises(CredentialsError):
        derive(new_doc, {"pw": b"x", "mail": old_code.encode()}, rng, channel=inbox, unix_time=NOW)
    # the new one does
    out2 = derive(
        new_doc,
        {"pw": b"x", "mail": inbox.latest("a@b.co").encode()},
        rng,
        channel=inbox,
        unix_time=NOW,
    )
    assert out2.key.sigma == result.key.sigma


def test_subset_independence_exhaustive_n4():
    rng = random.Random(16).randbytes
    inbox = MockInbox()
    result = setup(
        [
            PasswordSpec("a", "pw-a"),
            PasswordSpec("b", "pw-b"),
            PasswordSpec("c", "pw-c"),
            PasswordSpec("d", "pw-d"),
        ],
        2,
        CFG,
        rng,
        channel=inbox,
    )
    doc = result.document
    values = {"a": b"pw-a", "b": b"pw-b", "c": b"pw-c", "d": b"pw-d"}
    for size in (2, 3, 4):
        for combo in itertools.combinations(values, size):
            out = derive(doc, {fid: values[fid] for fid in combo}, rng)
            assert out.key.sigma == result.key.sigma


def test_reconfigure_replaces_password():
    result, box, inbox, rng = default_setup()
    doc = result.document
    out = derive(
        doc,
        {"recovery": box.witness(doc, "recovery"), "yubikey": box.witness(doc, "yubikey")},
        rng,
        unix_time=NOW,
    )
    rec = reconfigure_factor(
        out.document, out.key, "password", PasswordSpec("password", "n3w-pass"), rng
    )
    new_doc = rec.document
    assert new_doc.version == out.document.version + 1

    box.passwords["password"] = "n3w-pass"
    out2 = derive(
        new_doc,
        {"password": b"n3w-pass", "yubikey": box.witness(new_doc, "yubikey")},
        rng,
        unix_time=NOW,
    )
    assert out2.key.sigma == result.key.sigma

    with pytest.raises(CredentialsError):
        derive(
            new_doc,
            {"password": b"hunter2", "yubikey": box.witness(new_doc, "yubikey")},
            rng,
            unix_time=NOW,
        )


def test_reconfigure_identical_spec_changes_bytes_not_sigma():
    result, box, _, rng = default_setup()
    doc = result.document
    out = derive(
        doc,
        {"password": b"hunter2", "recovery": box.witness(doc, "recovery")},
        rng,
        unix_time=NOW,
    )
    before = canonical_serialize(out.document)
    rec = reconfigure_factor(
        out.document, out.key, "password", PasswordSpec("password", "hunter2"), rng
    )
    assert canonical_serialize(rec.document) != before
    assert rec.document.entry("password").factor_salt != out.document.entry("password").factor_salt
    out2 = derive(
        rec.document,
        {"password": b"hunter2", "recovery": box.witness(rec.document, "recovery")},
        rng,
        unix_time=NOW,
    )
    assert out2.key.sigma == result.key.sigma


def test_reconfigure_wrong_key_rejected():
    result, box, _, rng = default_setup()
    other = setup([PasswordSpec("pw", "x")], 1, CFG, random.Random(999).randbytes)
    with pytest.raises(CredentialsError):
        reconfigure_factor(
            result.document, other.key, "password", PasswordSpec("password", "zz"), rng
        )
    with pytest.raises(UnknownFactorError):
        reconfigure_factor(
            result.document, result.key, "ghost", PasswordSpec("ghost", "zz"), rng
        )


def test_attestation_round_trip_and_fuzz():
    result, _, _, _ = default_setup()
    signed = attest(result.document, result.key.signing_seed)
    assert verify_attestation(signed)

    data = canonical_serialize(signed)
    # flipping any byte breaks the signature or the parse
    for pos in range(0, len(data), 13):
        corrupted = bytearray(data)
        corrupted[pos] ^= 0x01
        try:
            doc = parse(bytes(corrupted))
        except Exception:
            continue
        assert not verify_attestation(doc), f"byte {pos} flip still verifies"


def test_attestation_wrong_wallet_seed_fails():
    result, _, _, _ = default_setup(seed=20)
    other = setup([PasswordSpec("pw", "x")], 1, CFG, random.Random(21).randbytes)
    cross = attest(result.document, other.key.signing_seed)
    assert not verify_attestation(cross)


def test_unattested_document_does_not_verify():
    result, _, _, _ = default_setup(seed=22)
    assert not verify_attestation(result.document)


def test_stretch_deterministic_with_salt_avalanche():
    from mfwallet.mfkdf import stretch_final

    secret, salt = b"\x11" * 32, bytearray(b"\x22" * 32)
    first = stretch_final(secret, bytes(salt), CFG)
    assert stretch_final(secret, bytes(salt), CFG) == first
    salt[0] ^= 0x01
    assert stretch_final(secret, bytes(salt), CFG) != first


def test_stretch_test_profile_under_100ms():
    import time

    from mfwallet.mfkdf import stretch_final

    started = time.perf_counter()
    stretch_final(b"\x00" * 32, b"\x01" * 32, KdfConfig.test())
    assert time.perf_counter() - started < 0.1
