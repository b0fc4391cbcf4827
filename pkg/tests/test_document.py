"""Canonical serialization: round-trip exact, order-stable, byte-identical."""

import random

import pytest

from mfwallet.errors import MalformedDocumentError, ValidationError
from mfwallet.factors import HotpSpec, PasswordSpec, RecoveryCodeSpec
from mfwallet.mfkdf import KdfConfig, canonical_serialize, parse, setup


@pytest.fixture(scope="module")
def doc():
    rng = random.Random(100).randbytes
    return setup(
        [
            PasswordSpec("password", "correct horse"),
            HotpSpec("authenticator"),
            RecoveryCodeSpec("recovery"),
        ],
        2,
        KdfConfig.test(),
        rng,
    ).document


def test_round_trip_identity(doc):
    data = canonical_serialize(doc)
    assert parse(data) == doc
    assert canonical_serialize(parse(data)) == data


def test_serialization_is_idempotent_and_stable(doc):
    assert canonical_serialize(doc) == canonical_serialize(doc)


def test_no_insignificant_whitespace(doc):
    data = canonical_serialize(doc)
    # canonical form has no spaces outside string values
    import json

    decoded = json.loads(data)
    assert b": " not in data and b", " not in data
    assert decoded["wallet_address"] == doc.wallet_address.hex()


def test_small_policy_under_size_budget(doc):
    assert len(canonical_serialize(doc)) <= 10240


def test_parse_rejects_unknown_schema(doc):
    import json

    obj = json.loads(canonical_serialize(doc))
    obj["schema_version"] = 99
    with pytest.raises(MalformedDocumentError):
        parse(json.dumps(obj).encode())


def test_parse_rejects_garbage():
    with pytest.raises(MalformedDocumentError):
        parse(b"\xff\x00 not json")
    with pytest.raises(MalformedDocumentError):
        parse(b"[1,2,3]")
    with pytest.raises(MalformedDocumentError):
        parse(b'{"schema_version":1}')


def test_parse_rejects_bad_threshold(doc):
    import json

    obj = json.loads(canonical_serialize(doc))
    obj["threshold_t"] = 7
    with pytest.raises(MalformedDocumentError):
        parse(json.dumps(obj).encode())
    obj["threshold_t"] = 0
    with pytest.raises(MalformedDocumentError):
        parse(json.dumps(obj).encode())


def test_parse_rejects_duplicate_factor_ids(doc):
    import json

    obj = json.loads(canonical_serialize(doc))
    obj["factors"].append(obj["factors"][0])
    obj["threshold_t"] = 2
    with pytest.raises(MalformedDocumentError):
        parse(json.dumps(obj).encode())


def test_kdf_config_profiles():
    KdfConfig.production().validate()
    KdfConfig.test().validate()
    with pytest.raises(ValidationError):
        KdfConfig(memory_cost_kib=64, profile="production").validate()
    with pytest.raises(ValidationError):
        KdfConfig(profile="benchmark").validate()


def test_attestation_field_optional(doc):
    assert doc.attestation is None
    data = canonical_serialize(doc)
    assert b"attestation" not in data
