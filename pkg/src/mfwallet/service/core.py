"""Wallet lifecycle orchestration over derivation, storage and the ledger.

A service instance is one "device" on the simulated network: it owns a home
peer and holds login sessions in memory. Several instances can share one
backend, which is how cross-device portability is exercised: nothing about
a wallet lives on the instance, only on the network.
"""

import secrets
import threading
import time
from dataclasses import dataclass, field

from ..errors import (
    AuthenticationRequiredError,
    NotFoundError,
    StoreRejectedError,
    ValidationError,
)
from ..factors import (
    FactorSetupSpec,
    HmacTokenSpec,
    HotpSpec,
    MockInbox,
    OobaSpec,
    PasswordSpec,
    RecoveryCodeSpec,
    TotpSpec,
)
from ..ledger import Ledger, sign_transfer
from ..mfkdf import (
    DerivedKey,
    KdfConfig,
    attest,
    canonical_serialize,
    derive,
    parse,
    reconfigure_factor,
    setup,
)
from ..rng import Rng
from ..store import (
    Network,
    NetworkConfig,
    identifier_hash,
    make_binding,
    record_key_for_address,
)
from .config import ServiceConfig


@dataclass
class SharedBackend:
    """The simulated world: peer network, mock chain, OOBA inbox.

    All instances of the service in one process share this object; access
    is serialized through its lock.
    """

    network: Network
    ledger: Ledger
    inbox: MockInbox
    lock: threading.RLock = field(default_factory=threading.RLock)

    @classmethod
    def from_config(cls, config: ServiceConfig) -> "SharedBackend":
        ledger = Ledger(faucet_enabled=config.dev_mode)
        network = Network(
            NetworkConfig(
                peer_count=config.peer_count,
                topology=config.topology,
                capacity_bytes=config.capacity_bytes,
                min_value_units=config.min_value_units,
                rng_seed=config.rng_seed,
            ),
            balance_of=ledger.balance,
        )
        return cls(network=network, ledger=ledger, inbox=MockInbox())


@dataclass
class Session:
    session_id: str
    wallet_address: bytes
    key: DerivedKey = field(repr=False)
    expires_at: float


def parse_factor_spec(obj: dict) -> FactorSetupSpec:
    factor_id = str(obj.get("id", "")).strip()
    factor_type = str(obj.get("type", "")).strip()
    params = obj.get("params", {}) or {}
    if not factor_id:
        raise ValidationError("factor spec needs an id")
    if factor_type == "password":
        return PasswordSpec(factor_id, str(params.get("password", "")))
    if factor_type == "recovery_code":
        return RecoveryCodeSpec(factor_id, params.get("code"))
    if factor_type == "hotp":
        return HotpSpec(factor_id, digits=int(params.get("digits", 6)))
    if factor_type == "totp":
        return TotpSpec(
            factor_id,
            digits=int(params.get("digits", 6)),
            step_seconds=int(params.get("step_seconds", 30)),
            window=int(params.get("window", 32768)),
        )
    if factor_type == "ooba":
        return OobaSpec(factor_id, str(params.get("email", "")), digits=int(params.get("digits", 6)))
    if factor_type == "hmac_token":
        secret_hex = params.get("secret_hex")
        return HmacTokenSpec(factor_id, bytes.fromhex(secret_hex) if secret_hex else None)
    raise ValidationError(f"unknown factor type {factor_type!r}")


def decode_witnesses(doc, witnesses: dict[str, str]) -> dict[str, bytes]:
    """Wire witnesses are strings; token responses travel hex-encoded."""
    decoded = {}
    types = {f.factor_id: f.factor_type for f in doc.factors}
    for factor_id, value in witnesses.items():
        if types.get(factor_id) == "hmac_token":
            try:
                decoded[factor_id] = bytes.fromhex(value)
            except ValueError as exc:
                raise ValidationError(f"token response must be hex: {exc}") from exc
        else:
            decoded[factor_id] = str(value).encode("utf-8")
    return decoded


class WalletService:
    def __init__(
        self,
        config: ServiceConfig,
        backend: SharedBackend | None = None,
        rng: Rng = secrets.token_bytes,
        clock=time.time,
    ):
        self.config = config
        self.backend = backend or SharedBackend.from_config(config)
        self.rng = rng
        self.clock = clock
        self.home_peer = config.home_peer
        self.sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()
        self._wallet_locks: dict[bytes, threading.Lock] = {}
        self._wallet_locks_guard = threading.Lock()

    # -- helpers --------------------------------------------------------------

    def _kdf_config(self, profile: str | None) -> KdfConfig:
        chosen = profile or self.config.kdf_profile
        if chosen == "test":
            return KdfConfig.test()
        if chosen == "production":
            return KdfConfig.production()
        raise ValidationError(f"unknown kdf profile {chosen!r}")

    def _wallet_lock(self, address: bytes) -> threading.Lock:
        with self._wallet_locks_guard:
            return self._wallet_locks.setdefault(address, threading.Lock())

    def _resolve(self, identifier_or_address: str) -> bytes:
        text = identifier_or_address.strip()
        if "@" in text:
            with self.backend.lock:
                return self.backend.network.resolve(self.home_peer, text)
        try:
            address = bytes.fromhex(text)
        except ValueError as exc:
            raise ValidationError(f"not an address or email: {text!r}") from exc
        if len(address) != 20:
            raise ValidationError("addresses are 20 bytes (40 hex characters)")
        return address

    def _fetch_document(self, address: bytes):
        with self.backend.lock:
            data = self.backend.network.get(
                self.home_peer, record_key_for_address(address)
            )
        return parse(data)

    def _publish(self, doc, key: DerivedKey) -> bool:
        signed = attest(doc, key.signing_seed)
        data = canonical_serialize(signed)
        with self.backend.lock:
            accepted = self.backend.network.put(self.home_peer, data)
            if accepted:
                self.backend.network.run(self.config.gossip_rounds)
        return accepted

    def _session(self, session_id: str | None) -> Session:
        if not session_id:
            raise AuthenticationRequiredError("session required")
        with self._sessions_lock:
            session = self.sessions.get(session_id)
            if session is None:
                raise AuthenticationRequiredError("unknown session")
            if self.clock() >= session.expires_at:
                del self.sessions[session_id]
                raise AuthenticationRequiredError("session expired")
            return session

    # -- operations ------------------------------------------------------------

    def signup(self, request: dict) -> dict:
        factors = request.get("factors")
        threshold = int(request.get("threshold", 2))
        if factors:
            specs = [parse_factor_spec(f) for f in factors]
        else:
            # default template: password + simulated token + recovery code, 2-of-3
            password = request.get("password")
            if not password:
                raise ValidationError("either factors or a password must be given")
            specs = [
                PasswordSpec("password", str(password)),
                HmacTokenSpec("token"),
                RecoveryCodeSpec("recovery"),
            ]
            threshold = 2
        identifier = request.get("identifier")
        ident_hash = identifier_hash(identifier) if identifier else None

        result = setup(
            specs,
            threshold,
            self._kdf_config(request.get("kdf_profile")),
            self.rng,
            identifier_hash=ident_hash,
            channel=self.backend.inbox,
        )
        doc = attest(result.document, result.key.signing_seed)
        data = canonical_serialize(doc)
        with self.backend.lock:
            if not self.backend.network.put(self.home_peer, data):
                raise StoreRejectedError("network rejected the signup document")
            if identifier:
                binding = make_binding(
                    result.key.signing_seed, ident_hash, doc.wallet_address, doc.version
                )
                if not self.backend.network.bind_identifier(
                    self.home_peer, binding, data
                ):
                    raise StoreRejectedError(
                        f"identifier {identifier!r} is already bound"
                    )
            self.backend.network.run(self.config.gossip_rounds)
        return {
            "wallet_address": doc.wallet_address.hex(),
            "identifier": identifier,
            "policy_version": doc.version,
            "disclosures": result.disclosures,
        }

    def login(self, identifier_or_address: str, witnesses: dict[str, str]) -> dict:
        address = self._resolve(identifier_or_address)
        with self._wallet_lock(address):
            doc = self._fetch_document(address)
            out = derive(
                doc,
                decode_witnesses(doc, witnesses),
                self.rng,
                channel=self.backend.inbox,
            )
            if not self._publish(out.document, out.key):
                # someone advanced the document meanwhile: retry once fresh
                doc = self._fetch_document(address)
                out = derive(
                    doc,
                    decode_witnesses(doc, witnesses),
                    self.rng,
                    channel=self.backend.inbox,
                )
                if not self._publish(out.document, out.key):
                    raise StoreRejectedError("document version conflict; retry exhausted")

        session = Session(
            session_id=self.rng(16).hex(),
            wallet_address=address,
            key=out.key,
            expires_at=self.clock() + self.config.session_ttl_seconds,
        )
        with self._sessions_lock:
            self.sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "wallet_address": address.hex(),
            "expires_at": session.expires_at,
            "policy_version": out.document.version,
        }

    def logout(self, session_id: str) -> None:
        with self._sessions_lock:
            self.sessions.pop(session_id, None)

    def recover_factor(self, session_id: str, factor_id: str, new_spec: dict) -> dict:
        session = self._session(session_id)
        spec = parse_factor_spec(new_spec)
        with self._wallet_lock(session.wallet_address):
            doc = self._fetch_document(session.wallet_address)
            rec = reconfigure_factor(
                doc, session.key, factor_id, spec, self.rng,
                channel=self.backend.inbox,
            )
            if not self._publish(rec.document, session.key):
                raise StoreRejectedError("document version conflict during recovery")
        return {
            "policy_version": rec.document.version,
            "disclosures": rec.disclosures,
        }

    def send(self, session_id: str, recipient_hex: str, amount: int) -> dict:
        session = self._session(session_id)
        if amount <= 0:
            raise ValidationError("amount must be positive")
        try:
            recipient = bytes.fromhex(recipient_hex)
        except ValueError as exc:
            raise ValidationError("recipient must be hex") from exc
        if len(recipient) != 20:
            raise ValidationError("recipient address must be 20 bytes")
        with self.backend.lock:
            nonce = self.backend.ledger.next_nonce(session.wallet_address)
            transfer = sign_transfer(session.key.signing_seed, recipient, amount, nonce)
            self.backend.ledger.submit_transfer(transfer)
        return {
            "from": session.wallet_address.hex(),
            "to": recipient_hex,
            "amount": amount,
            "nonce": nonce,
        }

    def balance(self, identifier_or_address: str) -> dict:
        address = self._resolve(identifier_or_address)
        with self.backend.lock:
            units = self.backend.ledger.balance(address)
        return {"wallet_address": address.hex(), "balance_units": units}

    def policy(self, identifier_or_address: str) -> bytes:
        address = self._resolve(identifier_or_address)
        with self.backend.lock:
            return self.backend.network.get(
                self.home_peer, record_key_for_address(address)
            )

    def inbox_latest(self, email: str) -> dict:
        if not self.config.dev_mode:
            raise NotFoundError("inbox endpoint is only available in dev mode")
        code = self.backend.inbox.latest(email)
        if code is None:
            raise NotFoundError(f"no code delivered to {email!r}")
        return {"email": email.strip().lower(), "code": code}

    def faucet(self, address_hex: str, amount: int) -> dict:
        address = bytes.fromhex(address_hex)
        with self.backend.lock:
            self.backend.ledger.fund(address, amount)  # raises unless dev faucet on
            units = self.backend.ledger.balance(address)
        return {"wallet_address": address_hex, "balance_units": units}

    def healthz(self) -> dict:
        with self.backend.lock:
            return {
                "status": "ok",
                "round": self.backend.network.round,
                "home_peer": self.home_peer,
                "peer_count": self.config.peer_count,
            }
