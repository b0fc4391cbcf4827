"""Threshold multi-factor key derivation.

Setup splits a random master secret into factor-guarded Shamir shares; any
t correct witnesses decrypt enough shares to rebuild it, and a memory-hard
stretch of the master secret yields the static key sigma. Every successful
derivation rolls the document forward: one-time factors get new offsets,
challenges and codes, and the result must be re-attested and re-published.

Wrong witnesses are detected by AEAD authentication on the share envelopes,
never by comparing against any stored verifier of sigma (forgery of the
AEAD tag is assumed negligible).
"""

import json
import secrets
from dataclasses import dataclass
from typing import Mapping

from .. import keys
from ..errors import (
    CredentialsError,
    DuplicateFactorError,
    InsufficientWitnessesError,
    MalformedDocumentError,
    StaleDocumentError,
    UnknownFactorError,
    ValidationError,
)
from ..factors.channel import OutOfBandChannel
from ..factors.suite import (
    FactorContext,
    FactorSetupSpec,
    derive_target,
    setup_factor,
    update_factor,
)
from .document import (
    Attestation,
    DerivedKey,
    FactorEntry,
    KdfConfig,
    PolicyDocument,
    b64d,
    b64e,
    canonical_serialize,
    parse,
    signing_bytes,
)
from .kdf import (
    MASTER_AAD,
    inner_aad,
    open_sealed,
    seal,
    share_aad,
    share_key,
    stretch_final,
)
from ..rng import Rng
from .shamir import Share, combine_shares, share_at, split_secret

__all__ = [
    "SetupResult",
    "DeriveResult",
    "ReconfigureResult",
    "setup",
    "derive",
    "reconfigure_factor",
    "policy_entropy",
    "attest",
    "verify_attestation",
    "canonical_serialize",
    "parse",
]


@dataclass
class SetupResult:
    document: PolicyDocument
    key: DerivedKey
    disclosures: dict[str, dict]


@dataclass
class DeriveResult:
    key: DerivedKey
    document: PolicyDocument


@dataclass
class ReconfigureResult:
    document: PolicyDocument
    disclosures: dict[str, dict]


def _seal_payload(
    wrap_key: bytes, factor_id: str, target: bytes, inner: bytes | None, rng: Rng
) -> bytes:
    payload = {"target": b64e(target), "secret": b64e(inner) if inner else None}
    return seal(
        wrap_key,
        json.dumps(payload, sort_keys=True).encode("utf-8"),
        inner_aad(factor_id),
        rng,
    )


def _open_payload(wrap_key: bytes, factor_id: str, blob: bytes) -> tuple[bytes, bytes | None]:
    raw = open_sealed(wrap_key, blob, inner_aad(factor_id))
    try:
        payload = json.loads(raw.decode("utf-8"))
        target = b64d(payload["target"])
        inner = b64d(payload["secret"]) if payload.get("secret") else None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise MalformedDocumentError(f"corrupt wrapped payload: {exc}") from exc
    return target, inner


def _encrypt_share(
    target: bytes, factor_salt: bytes, factor_id: str, share: Share, rng: Rng
) -> bytes:
    return seal(
        share_key(target, factor_salt),
        bytes([share.x]) + share.y,
        share_aad(factor_id),
        rng,
    )


def _decrypt_share(
    target: bytes, entry: FactorEntry
) -> Share:
    raw = open_sealed(
        share_key(target, entry.factor_salt), entry.encrypted_share, share_aad(entry.factor_id)
    )
    if len(raw) != 33 or raw[0] != entry.share_index:
        raise MalformedDocumentError("share payload does not match its entry")
    return Share(x=raw[0], y=raw[1:])


def setup(
    specs: list[FactorSetupSpec],
    threshold_t: int,
    kdf_config: KdfConfig,
    rng: Rng = secrets.token_bytes,
    *,
    identifier_hash: bytes | None = None,
    channel: OutOfBandChannel | None = None,
    unix_time: int | None = None,
) -> SetupResult:
    """Establish a policy: one guarded share per factor, any t recover sigma."""
    if not 1 <= threshold_t <= len(specs) <= 16:
        raise ValidationError("need 1 <= threshold <= number of factors <= 16")
    ids = [s.factor_id for s in specs]
    if len(set(ids)) != len(ids):
        raise DuplicateFactorError(f"duplicate factor ids in {ids}")
    kdf_config.validate()

    ctx = FactorContext(rng=rng, unix_time=unix_time, channel=channel)
    master = rng(32)
    global_salt = rng(32)
    sigma = stretch_final(master, global_salt, kdf_config)
    key = DerivedKey.from_sigma(sigma)
    _, _, wallet_address = keys.keypair_from_seed(key.signing_seed)

    shares = split_secret(master, threshold_t, len(specs), rng)
    entries = []
    wrapped: dict[str, bytes] = {}
    disclosures: dict[str, dict] = {}
    for spec, share in zip(specs, shares):
        material = setup_factor(spec, ctx)
        factor_salt = rng(32)
        entries.append(
            FactorEntry(
                factor_id=spec.factor_id,
                factor_type=spec.factor_type,
                share_index=share.x,
                encrypted_share=_encrypt_share(
                    material.target, factor_salt, spec.factor_id, share, rng
                ),
                factor_salt=factor_salt,
                public_params=material.public_params,
                entropy_bits=material.entropy_bits,
            )
        )
        wrapped[spec.factor_id] = _seal_payload(
            key.wrap_key, spec.factor_id, material.target, material.inner_secret, rng
        )
        if material.disclosures:
            disclosures[spec.factor_id] = material.disclosures

    doc = PolicyDocument(
        version=1,
        threshold_t=threshold_t,
        wallet_address=wallet_address,
        global_salt=global_salt,
        kdf_config=kdf_config,
        factors=tuple(entries),
        wrapped_inner_secrets=wrapped,
        wrapped_master=seal(key.wrap_key, master, MASTER_AAD, rng),
        identifier_hash=identifier_hash,
    )
    doc.validate()
    return SetupResult(document=doc, key=key, disclosures=disclosures)


def derive(
    doc: PolicyDocument,
    witnesses: Mapping[str, bytes],
    rng: Rng = secrets.token_bytes,
    *,
    channel: OutOfBandChannel | None = None,
    unix_time: int | None = None,
) -> DeriveResult:
    """Recover sigma from >= t correct witnesses and roll the document forward.

    Witnesses map factor id to the presented value (password bytes, decimal
    OTP digits, 20-byte token response). Factors are tried in lexicographic
    id order and the first t that authenticate reconstruct the secret; the
    result is the same for every correct subset.
    """
    doc.validate()
    if len(witnesses) < doc.threshold_t:
        raise InsufficientWitnessesError(
            f"{len(witnesses)} witnesses for threshold {doc.threshold_t}"
        )
    for factor_id in witnesses:
        if not any(f.factor_id == factor_id for f in doc.factors):
            raise UnknownFactorError(f"witness for unknown factor {factor_id!r}")

    ctx = FactorContext(rng=rng, unix_time=unix_time, channel=channel)
    authenticated: dict[str, Share] = {}
    stale: list[StaleDocumentError] = []
    for factor_id in sorted(witnesses):
        entry = doc.entry(factor_id)
        try:
            target = derive_target(
                entry.factor_type, entry.public_params, witnesses[factor_id], ctx
            )
            authenticated[factor_id] = _decrypt_share(target, entry)
        except StaleDocumentError as exc:
            stale.append(exc)
        except CredentialsError:
            continue

    if len(authenticated) < doc.threshold_t:
        if stale:
            raise stale[0]
        raise CredentialsError("invalid credentials")

    chosen = [authenticated[fid] for fid in sorted(authenticated)][: doc.threshold_t]
    master = combine_shares(chosen, doc.threshold_t)
    sigma = stretch_final(master, doc.global_salt, doc.kdf_config)
    key = DerivedKey.from_sigma(sigma)

    check = open_master(doc, key)
    if check != master:
        raise MalformedDocumentError("document master secret mismatch")

    new_doc = _feed_forward(doc, key, chosen, set(authenticated), ctx)
    return DeriveResult(key=key, document=new_doc)


def open_master(doc: PolicyDocument, key: DerivedKey) -> bytes:
    return open_sealed(key.wrap_key, doc.wrapped_master, MASTER_AAD)


def _feed_forward(
    doc: PolicyDocument,
    key: DerivedKey,
    known_shares: list[Share],
    used_ids: set[str],
    ctx: FactorContext,
) -> PolicyDocument:
    """Refresh one-time factor parameters and re-seal all wrapped material."""
    new_entries = []
    new_wrapped: dict[str, bytes] = {}
    for entry in doc.factors:
        target, inner = _open_payload(
            key.wrap_key, entry.factor_id, doc.wrapped_inner_secrets[entry.factor_id]
        )
        upd = update_factor(
            entry.factor_type,
            entry.public_params,
            target,
            inner,
            entry.factor_id in used_ids,
            ctx,
        )
        if upd.target != target:
            # rotated target: re-key the share envelope under a fresh salt
            share = share_at(known_shares, doc.threshold_t, entry.share_index)
            factor_salt = ctx.rng(32)
            encrypted_share = _encrypt_share(
                upd.target, factor_salt, entry.factor_id, share, ctx.rng
            )
        else:
            factor_salt = entry.factor_salt
            encrypted_share = entry.encrypted_share
        new_entries.append(
            FactorEntry(
                factor_id=entry.factor_id,
                factor_type=entry.factor_type,
                share_index=entry.share_index,
                encrypted_share=encrypted_share,
                factor_salt=factor_salt,
                public_params=upd.public_params,
                entropy_bits=entry.entropy_bits,
            )
        )
        new_wrapped[entry.factor_id] = _seal_payload(
            key.wrap_key, entry.factor_id, upd.target, upd.inner_secret, ctx.rng
        )

    master = combine_shares(known_shares, doc.threshold_t)
    new_doc = PolicyDocument(
        version=doc.version + 1,
        threshold_t=doc.threshold_t,
        wallet_address=doc.wallet_address,
        global_salt=doc.global_salt,
        kdf_config=doc.kdf_config,
        factors=tuple(new_entries),
        wrapped_inner_secrets=new_wrapped,
        wrapped_master=seal(key.wrap_key, master, MASTER_AAD, ctx.rng),
        identifier_hash=doc.identifier_hash,
    )
    new_doc.validate()
    return new_doc


def reconfigure_factor(
    doc: PolicyDocument,
    key: DerivedKey,
    factor_id: str,
    new_spec: FactorSetupSpec,
    rng: Rng = secrets.token_bytes,
    *,
    channel: OutOfBandChannel | None = None,
    unix_time: int | None = None,
) -> ReconfigureResult:
    """Replace one factor while keeping sigma: re-split the master secret and
    re-key every share, so material guarded by the lost factor goes stale."""
    doc.validate()
    if not any(f.factor_id == factor_id for f in doc.factors):
        raise UnknownFactorError(f"no factor {factor_id!r} to reconfigure")
    for entry in doc.factors:
        if entry.factor_id != factor_id and entry.factor_id == new_spec.factor_id:
            raise DuplicateFactorError(
                f"factor id {new_spec.factor_id!r} already present"
            )

    master = open_master(doc, key)  # wrong key fails AEAD here
    ctx = FactorContext(rng=rng, unix_time=unix_time, channel=channel)
    shares = split_secret(master, doc.threshold_t, len(doc.factors), rng)

    new_entries = []
    new_wrapped: dict[str, bytes] = {}
    disclosures: dict[str, dict] = {}
    for entry, share in zip(doc.factors, shares):
        if entry.factor_id == factor_id:
            material = setup_factor(new_spec, ctx)
            factor_salt = rng(32)
            new_entries.append(
                FactorEntry(
                    factor_id=new_spec.factor_id,
                    factor_type=new_spec.factor_type,
                    share_index=share.x,
                    encrypted_share=_encrypt_share(
                        material.target, factor_salt, new_spec.factor_id, share, rng
                    ),
                    factor_salt=factor_salt,
                    public_params=material.public_params,
                    entropy_bits=material.entropy_bits,
                )
            )
            new_wrapped[new_spec.factor_id] = _seal_payload(
                key.wrap_key, new_spec.factor_id, material.target, material.inner_secret, rng
            )
            if material.disclosures:
                disclosures[new_spec.factor_id] = material.disclosures
        else:
            target, inner = _open_payload(
                key.wrap_key, entry.factor_id, doc.wrapped_inner_secrets[entry.factor_id]
            )
            new_entries.append(
                FactorEntry(
                    factor_id=entry.factor_id,
                    factor_type=entry.factor_type,
                    share_index=share.x,
                    encrypted_share=_encrypt_share(
                        target, entry.factor_salt, entry.factor_id, share, rng
                    ),
                    factor_salt=entry.factor_salt,
                    public_params=entry.public_params,
                    entropy_bits=entry.entropy_bits,
                )
            )
            new_wrapped[entry.factor_id] = _seal_payload(
                key.wrap_key, entry.factor_id, target, inner, rng
            )

    new_doc = PolicyDocument(
        version=doc.version + 1,
        threshold_t=doc.threshold_t,
        wallet_address=doc.wallet_address,
        global_salt=doc.global_salt,
        kdf_config=doc.kdf_config,
        factors=tuple(new_entries),
        wrapped_inner_secrets=new_wrapped,
        wrapped_master=seal(key.wrap_key, master, MASTER_AAD, rng),
        identifier_hash=doc.identifier_hash,
    )
    new_doc.validate()
    return ReconfigureResult(document=new_doc, disclosures=disclosures)


def policy_entropy(doc: PolicyDocument) -> float:
    """Bits of the weakest accepted factor combination: the minimum over all
    t-subsets of summed per-factor entropy, i.e. the t smallest summed."""
    bits = sorted(f.entropy_bits for f in doc.factors)
    return float(sum(bits[: doc.threshold_t]))


def attest(doc: PolicyDocument, signing_seed: bytes) -> PolicyDocument:
    """Sign the canonical document with the wallet key derived from the seed."""
    sk, vk, _ = keys.keypair_from_seed(signing_seed)
    signature = sk.sign(signing_bytes(doc))
    return doc.with_attestation(Attestation(verification_key=vk, signature=signature))


def verify_attestation(doc: PolicyDocument) -> bool:
    """True iff the signature verifies and the signer's address is the
    document's wallet address."""
    att = doc.attestation
    if att is None:
        return False
    if keys.address_from_verify_key(att.verification_key) != doc.wallet_address:
        return False
    return keys.verify(att.verification_key, att.signature, signing_bytes(doc))
