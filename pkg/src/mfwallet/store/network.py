"""Deterministic round-based simulator of the parameter-replication network.

Peers hold attested policy documents keyed by wallet address and gossip
them to neighbors one hop per round. Direct writes are compare-and-set
(exactly prior version + 1) so a device deriving from a stale document
cannot clobber a newer one; gossip reconciliation accepts any strictly
newer attested version so peers converge after missed updates.

Under storage pressure a peer discards every record whose on-chain balance
is below the configured value floor before touching a funded record, which
is what defeats storage-flooding: worthless documents can always be dropped
without destroying value.
"""

import hashlib
import json
import random
from collections import deque
from dataclasses import dataclass, field

from .. import keys
from ..errors import (
    AttestationError,
    MalformedDocumentError,
    NotFoundError,
    StoreRejectedError,
    ValidationError,
)
from ..mfkdf import parse, verify_attestation

KEY_LEN = 32
MAX_RECORD_BYTES = 1 << 20

BIND_PAYLOAD_PREFIX = b"mfwallet/bind/v1"


def record_key_for_address(address: bytes) -> bytes:
    if len(address) != keys.ADDRESS_LEN:
        raise ValidationError("address must be 20 bytes")
    return address + b"\x00" * (KEY_LEN - keys.ADDRESS_LEN)


def identifier_hash(identifier: str) -> bytes:
    return hashlib.sha256(identifier.strip().lower().encode("utf-8")).digest()


def binding_payload(ident_hash: bytes, wallet_address: bytes) -> bytes:
    return BIND_PAYLOAD_PREFIX + ident_hash + wallet_address


@dataclass(frozen=True)
class IdentifierBinding:
    identifier_hash: bytes
    wallet_address: bytes
    binding_signature: bytes
    doc_version: int

    def to_json(self) -> dict:
        return {
            "identifier_hash": self.identifier_hash.hex(),
            "wallet_address": self.wallet_address.hex(),
            "binding_signature": self.binding_signature.hex(),
            "doc_version": self.doc_version,
        }


def make_binding(
    signing_seed: bytes, ident_hash: bytes, wallet_address: bytes, doc_version: int
) -> IdentifierBinding:
    return IdentifierBinding(
        identifier_hash=ident_hash,
        wallet_address=wallet_address,
        binding_signature=keys.sign(
            signing_seed, binding_payload(ident_hash, wallet_address)
        ),
        doc_version=doc_version,
    )


@dataclass
class StoredRecord:
    key: bytes
    doc_bytes: bytes
    version: int
    size_bytes: int
    attested_address: bytes
    received_round: int


@dataclass
class NetworkConfig:
    peer_count: int = 8
    topology: str = "complete"  # "complete" | "ring" | "random"
    random_degree: int = 3
    capacity_bytes: int = 64 << 20
    min_value_units: int = 0
    rng_seed: int = 0
    # each entry isolates a peer set during [from_round, to_round)
    drop_schedule: list[dict] = field(default_factory=list)

    @classmethod
    def from_json(cls, obj: dict) -> "NetworkConfig":
        cfg = cls(
            peer_count=int(obj.get("peer_count", 8)),
            topology=str(obj.get("topology", "complete")),
            random_degree=int(obj.get("random_degree", 3)),
            capacity_bytes=int(obj.get("capacity_bytes", 64 << 20)),
            min_value_units=int(obj.get("min_value_units", 0)),
            rng_seed=int(obj.get("rng_seed", 0)),
            drop_schedule=list(obj.get("drop_schedule", [])),
        )
        if cfg.peer_count < 1:
            raise ValidationError("need at least one peer")
        if cfg.topology not in ("complete", "ring", "random"):
            raise ValidationError(f"unknown topology {cfg.topology!r}")
        return cfg


@dataclass
class Peer:
    peer_id: int
    capacity_bytes: int
    records: dict[bytes, StoredRecord] = field(default_factory=dict)
    bindings: dict[bytes, IdentifierBinding] = field(default_factory=dict)
    neighbors: set[int] = field(default_factory=set)
    # key -> highest version discarded as worthless; blocks re-gossip thrash
    tombstones: dict[bytes, int] = field(default_factory=dict)

    @property
    def used_bytes(self) -> int:
        return sum(r.size_bytes for r in self.records.values())


class Network:
    """Single-threaded deterministic simulation; callers serialize access."""

    def __init__(self, config: NetworkConfig, balance_of=None):
        self.config = config
        self.balance_of = balance_of or (lambda address: 0)
        self.round = 0
        self.peers: dict[int, Peer] = {
            i: Peer(peer_id=i, capacity_bytes=config.capacity_bytes)
            for i in range(config.peer_count)
        }
        self._build_topology()
        self._pending: deque[tuple[int, int, int, tuple]] = deque()
        self._fork_anomalies: list[dict] = []

    def _build_topology(self) -> None:
        n = self.config.peer_count
        if n == 1:
            return
        if self.config.topology == "complete":
            for i in range(n):
                self.peers[i].neighbors = set(range(n)) - {i}
        elif self.config.topology == "ring":
            for i in range(n):
                self.peers[i].neighbors = {(i - 1) % n, (i + 1) % n}
        else:  # random: seeded extra edges on top of a ring so it stays connected
            rng = random.Random(self.config.rng_seed)
            for i in range(n):
                self.peers[i].neighbors = {(i - 1) % n, (i + 1) % n}
            degree = min(self.config.random_degree, n - 1)
            for i in range(n):
                while len(self.peers[i].neighbors) < degree:
                    j = rng.randrange(n)
                    if j != i:
                        self.peers[i].neighbors.add(j)
                        self.peers[j].neighbors.add(i)

    def diameter(self) -> int:
        worst = 0
        for start in self.peers:
            dist = {start: 0}
            frontier = deque([start])
            while frontier:
                cur = frontier.popleft()
                for nb in sorted(self.peers[cur].neighbors):
                    if nb not in dist:
                        dist[nb] = dist[cur] + 1
                        frontier.append(nb)
            worst = max(worst, max(dist.values()))
        return worst

    # -- partitions ---------------------------------------------------------

    def _edge_blocked(self, a: int, b: int, at_round: int) -> bool:
        for entry in self.config.drop_schedule:
            if int(entry["from_round"]) <= at_round < int(entry["to_round"]):
                isolated = set(entry["isolate"])
                if (a in isolated) != (b in isolated):
                    return True
        return False

    # -- validation ---------------------------------------------------------

    def _validate_doc(self, doc_bytes: bytes) -> StoredRecord:
        if len(doc_bytes) > MAX_RECORD_BYTES:
            raise StoreRejectedError("document exceeds the per-record size cap")
        try:
            doc = parse(doc_bytes)
        except MalformedDocumentError as exc:
            raise StoreRejectedError(f"unparseable document: {exc}") from exc
        if not verify_attestation(doc):
            raise AttestationError("document attestation does not verify")
        return StoredRecord(
            key=record_key_for_address(doc.wallet_address),
            doc_bytes=doc_bytes,
            version=doc.version,
            size_bytes=len(doc_bytes),
            attested_address=doc.wallet_address,
            received_round=self.round,
        )

    # -- write paths --------------------------------------------------------

    def put(self, origin_peer: int, doc_bytes: bytes) -> bool:
        """Direct write: compare-and-set against the origin peer's copy.

        Returns False when the version is not exactly one past the stored
        one (stale writer or fork); raises for invalid documents.
        """
        record = self._validate_doc(doc_bytes)
        peer = self.peers[origin_peer]
        prior = peer.records.get(record.key)
        if prior is not None and record.version != prior.version + 1:
            return False
        peer.records[record.key] = record
        peer.tombstones.pop(record.key, None)
        self._broadcast(origin_peer, ("record", doc_bytes))
        return True

    def _broadcast(self, src: int, message: tuple) -> None:
        for nb in sorted(self.peers[src].neighbors):
            self._pending.append((self.round + 1, src, nb, message))

    def _accept_record(self, peer: Peer, record: StoredRecord, report: dict) -> None:
        """Gossip acceptance: any strictly newer attested version wins."""
        prior = peer.records.get(record.key)
        if prior is not None:
            if record.version < prior.version:
                self._reject(report, peer, record, "stale_version")
                return
            if record.version == prior.version:
                if record.doc_bytes == prior.doc_bytes:
                    return  # duplicate, already replicated; stop gossiping
                # fork at equal version: lowest hash wins, logged as anomaly
                new_h = hashlib.sha256(record.doc_bytes).digest()
                old_h = hashlib.sha256(prior.doc_bytes).digest()
                self._fork_anomalies.append(
                    {
                        "round": self.round,
                        "peer": peer.peer_id,
                        "key": record.key.hex(),
                        "version": record.version,
                    }
                )
                if new_h >= old_h:
                    self._reject(report, peer, record, "fork_higher_hash")
                    return
        tombstone = peer.tombstones.get(record.key)
        if (
            tombstone is not None
            and record.version <= tombstone
            and self._effective_balance(record.attested_address) == 0
        ):
            self._reject(report, peer, record, "evicted_worthless")
            return
        peer.records[record.key] = record
        peer.tombstones.pop(record.key, None)
        report["accepted"].append(
            {"peer": peer.peer_id, "kind": "record", "key": record.key.hex(), "version": record.version}
        )
        self._broadcast(peer.peer_id, ("record", record.doc_bytes))

    @staticmethod
    def _reject(report: dict, peer: Peer, record: StoredRecord, reason: str) -> None:
        report["rejected"].append(
            {
                "peer": peer.peer_id,
                "kind": "record",
                "key": record.key.hex(),
                "version": record.version,
                "reason": reason,
            }
        )

    # -- identifier bindings -------------------------------------------------

    def _verify_binding(self, binding: IdentifierBinding, doc_bytes: bytes) -> None:
        doc = parse(doc_bytes)
        if not verify_attestation(doc):
            raise AttestationError("binding document attestation does not verify")
        if doc.wallet_address != binding.wallet_address:
            raise AttestationError("binding address does not match document")
        if doc.identifier_hash is not None and doc.identifier_hash != binding.identifier_hash:
            raise AttestationError("document embeds a different identifier")
        att = doc.attestation
        if not keys.verify(
            att.verification_key,
            binding.binding_signature,
            binding_payload(binding.identifier_hash, binding.wallet_address),
        ):
            raise AttestationError("binding signature does not verify")

    def bind_identifier(
        self, origin_peer: int, binding: IdentifierBinding, doc_bytes: bytes
    ) -> bool:
        """Publish an identifier -> wallet mapping authorized by the wallet key."""
        self._verify_binding(binding, doc_bytes)
        self.put(origin_peer, doc_bytes)
        peer = self.peers[origin_peer]
        if not self._apply_binding(peer, binding):
            return False
        self._broadcast(origin_peer, ("binding", binding, doc_bytes))
        return True

    def _apply_binding(self, peer: Peer, binding: IdentifierBinding) -> bool:
        """True only when the peer's state changed, so gossip terminates."""
        existing = peer.bindings.get(binding.identifier_hash)
        if existing is not None:
            if existing.wallet_address != binding.wallet_address:
                return False  # identifier already claimed by another wallet
            if binding.doc_version < existing.doc_version or existing == binding:
                return False
        peer.bindings[binding.identifier_hash] = binding
        return True

    # -- reads ---------------------------------------------------------------

    def _bfs_order(self, start: int) -> list[int]:
        seen = {start}
        order = [start]
        frontier = deque([start])
        while frontier:
            cur = frontier.popleft()
            for nb in sorted(self.peers[cur].neighbors):
                if nb not in seen and not self._edge_blocked(cur, nb, self.round):
                    seen.add(nb)
                    order.append(nb)
                    frontier.append(nb)
        return order

    def get(self, peer_id: int, key: bytes) -> bytes:
        """Local copy if present, else a hop-by-hop search for the highest
        version reachable under the current partition state."""
        local = self.peers[peer_id].records.get(key)
        if local is not None:
            return local.doc_bytes
        best: StoredRecord | None = None
        for pid in self._bfs_order(peer_id):
            record = self.peers[pid].records.get(key)
            if record is not None and (best is None or record.version > best.version):
                best = record
        if best is None:
            raise NotFoundError(f"no record for key {key.hex()} reachable")
        return best.doc_bytes

    def get_by_address(self, peer_id: int, address: bytes) -> bytes:
        return self.get(peer_id, record_key_for_address(address))

    def resolve(self, peer_id: int, identifier: str) -> bytes:
        """Identifier -> wallet address via replicated bindings."""
        ident = identifier_hash(identifier)
        for pid in self._bfs_order(peer_id):
            binding = self.peers[pid].bindings.get(ident)
            if binding is not None:
                return binding.wallet_address
        raise NotFoundError(f"identifier {identifier!r} is not bound")

    # -- eviction -------------------------------------------------------------

    def _effective_balance(self, address: bytes) -> int:
        balance = self.balance_of(address)
        return 0 if balance < self.config.min_value_units else balance

    def evict(self, peer: Peer, report: dict | None = None) -> list[bytes]:
        """Proof-of-value eviction, run when a peer is over capacity.

        Every record attested by an address with no effective balance is
        discarded first; funded records go only if worthless ones cannot
        free enough space, lowest balance and oldest first.
        """
        if peer.used_bytes <= peer.capacity_bytes:
            return []
        evicted: list[bytes] = []
        worthless = sorted(
            (r for r in peer.records.values() if self._effective_balance(r.attested_address) == 0),
            key=lambda r: (r.received_round, r.key),
        )
        for record in worthless:
            del peer.records[record.key]
            peer.tombstones[record.key] = max(
                record.version, peer.tombstones.get(record.key, 0)
            )
            evicted.append(record.key)
        if peer.used_bytes > peer.capacity_bytes:
            funded = sorted(
                peer.records.values(),
                key=lambda r: (
                    self._effective_balance(r.attested_address),
                    r.received_round,
                    r.key,
                ),
            )
            for record in funded:
                if peer.used_bytes <= peer.capacity_bytes:
                    break
                del peer.records[record.key]
                evicted.append(record.key)
            if peer.used_bytes > peer.capacity_bytes and report is not None:
                report["capacity_exhausted"].append(peer.peer_id)
        if evicted:
            gone_addresses = {k[: keys.ADDRESS_LEN] for k in evicted}
            peer.bindings = {
                h: b
                for h, b in peer.bindings.items()
                if b.wallet_address not in gone_addresses
            }
        if report is not None:
            report["evicted"].extend(
                {"peer": peer.peer_id, "key": k.hex()} for k in evicted
            )
        return evicted

    # -- simulation driver -----------------------------------------------------

    def step(self) -> dict:
        """Advance one round: deliver queued gossip, evict, report."""
        self.round += 1
        report = {
            "round": self.round,
            "delivered": 0,
            "dropped": 0,
            "accepted": [],
            "rejected": [],
            "evicted": [],
            "capacity_exhausted": [],
        }
        due = []
        remaining = deque()
        while self._pending:
            item = self._pending.popleft()
            (due if item[0] <= self.round else remaining).append(item)
        self._pending = remaining
        for _, src, dst, message in due:
            if self._edge_blocked(src, dst, self.round):
                report["dropped"] += 1
                continue
            report["delivered"] += 1
            peer = self.peers[dst]
            if message[0] == "record":
                try:
                    record = self._validate_doc(message[1])
                except (StoreRejectedError, AttestationError):
                    report["rejected"].append(
                        {"peer": dst, "kind": "record", "key": None, "version": None, "reason": "invalid"}
                    )
                    continue
                self._accept_record(peer, record, report)
            elif message[0] == "binding":
                binding, doc_bytes = message[1], message[2]
                try:
                    self._verify_binding(binding, doc_bytes)
                except AttestationError:
                    report["rejected"].append(
                        {"peer": dst, "kind": "binding", "key": binding.identifier_hash.hex(), "version": None, "reason": "invalid"}
                    )
                    continue
                if self._apply_binding(peer, binding):
                    report["accepted"].append(
                        {
                            "peer": dst,
                            "kind": "binding",
                            "key": binding.identifier_hash.hex(),
                            "version": binding.doc_version,
                        }
                    )
                    self._broadcast(dst, ("binding", binding, doc_bytes))
        for peer in self.peers.values():
            if peer.used_bytes > peer.capacity_bytes:
                self.evict(peer, report)
        return report

    def run(self, rounds: int) -> list[dict]:
        return [self.step() for _ in range(rounds)]

    def flush(self, max_rounds: int = 64) -> list[dict]:
        """Step until no gossip is queued (or the safety cap is hit)."""
        reports = []
        while self._pending and len(reports) < max_rounds:
            reports.append(self.step())
        return reports

    @property
    def pending_messages(self) -> int:
        return len(self._pending)

    @property
    def fork_anomalies(self) -> list[dict]:
        return list(self._fork_anomalies)

    def version_map(self, peer_id: int) -> dict[str, int]:
        return {
            k.hex(): r.version for k, r in sorted(self.peers[peer_id].records.items())
        }

    def snapshot(self) -> dict:
        """Stable digest of the whole network state, for determinism checks."""
        return {
            "round": self.round,
            "peers": {
                str(pid): {
                    "records": self.version_map(pid),
                    "bindings": {
                        h.hex(): b.wallet_address.hex()
                        for h, b in sorted(peer.bindings.items())
                    },
                    "used_bytes": peer.used_bytes,
                }
                for pid, peer in self.peers.items()
            },
        }

    def state_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.snapshot(), sort_keys=True).encode()
        ).hexdigest()
