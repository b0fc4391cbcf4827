"""Scripted network scenarios with deterministic trace output.

A scenario file describes the network, a set of wallets (real minimal
policies or attacker-crafted bulky flood documents), a funding table, and a
script of puts/gets/steps/partitions. Running it yields one structured
record per event, suitable for golden-file comparison.
"""

import base64
import json
import random
from dataclasses import dataclass

from ..errors import NotFoundError, ValidationError
from ..factors import PasswordSpec
from ..keys import keypair_from_seed
from ..ledger import Ledger
from ..mfkdf import (
    KdfConfig,
    attest,
    canonical_serialize,
    setup,
)
from ..mfkdf.document import FactorEntry, PolicyDocument
from .network import (
    Network,
    NetworkConfig,
    identifier_hash,
    make_binding,
    record_key_for_address,
)


@dataclass
class ScenarioWallet:
    name: str
    doc_bytes: bytes
    address: bytes
    signing_seed: bytes | None  # None for crafted flood documents


def make_wallet(
    seed: int, balance_hint: str = "", identifier: str | None = None
) -> ScenarioWallet:
    """Real minimal wallet: single password factor, test KDF profile."""
    rng = random.Random(("wallet", seed, balance_hint).__repr__()).randbytes
    result = setup(
        [PasswordSpec("password", f"scenario-{seed}")],
        1,
        KdfConfig.test(),
        rng,
        identifier_hash=identifier_hash(identifier) if identifier else None,
    )
    doc = attest(result.document, result.key.signing_seed)
    return ScenarioWallet(
        name=f"wallet-{seed}",
        doc_bytes=canonical_serialize(doc),
        address=doc.wallet_address,
        signing_seed=result.key.signing_seed,
    )


def craft_flood_document(rng, size_bytes: int) -> ScenarioWallet:
    """Attacker-style worthless document of roughly `size_bytes`.

    Storage peers only check attestation and structure, so an attacker can
    pad a validly signed document with an arbitrarily large one-time-code
    offset array without owning any usable factor material.
    """
    signing_seed = rng(32)
    _, _, address = keypair_from_seed(signing_seed)

    def build(window: int) -> bytes:
        offsets = base64.urlsafe_b64encode(rng(4 * window)).decode("ascii")
        doc = PolicyDocument(
            version=1,
            threshold_t=1,
            wallet_address=address,
            global_salt=rng(32),
            kdf_config=KdfConfig.test(),
            factors=(
                FactorEntry(
                    factor_id="totp",
                    factor_type="totp",
                    share_index=1,
                    encrypted_share=rng(61),
                    factor_salt=rng(32),
                    public_params={
                        "start_counter": 0,
                        "step_seconds": 30,
                        "digits": 6,
                        "window_offsets": offsets,
                    },
                    entropy_bits=19.93,
                ),
            ),
            wrapped_inner_secrets={"totp": rng(80)},
            wrapped_master=rng(60),
        )
        return canonical_serialize(attest(doc, signing_seed))

    window = max(1, (size_bytes * 3) // 16)
    data = build(window)
    if len(data) < size_bytes:
        window += ((size_bytes - len(data)) * 3) // 16 + 1
        data = build(window)
    return ScenarioWallet(
        name="flood", doc_bytes=data, address=address, signing_seed=None
    )


class ScenarioRunner:
    def __init__(self, scenario: dict):
        self.scenario = scenario
        self.config = NetworkConfig.from_json(scenario.get("network", {}))
        self.ledger = Ledger(faucet_enabled=True)
        self.network = Network(self.config, balance_of=self.ledger.balance)
        self.wallets: dict[str, ScenarioWallet] = {}
        self.events: list[dict] = []
        for spec in scenario.get("wallets", []):
            name = spec["name"]
            wallet = make_wallet(int(spec.get("seed", 0)), name, spec.get("identifier"))
            wallet.name = name
            self.wallets[name] = wallet
            balance = int(spec.get("balance_units", 0))
            if balance:
                self.ledger.fund(wallet.address, balance)

    def _wallet(self, name: str) -> ScenarioWallet:
        if name not in self.wallets:
            raise ValidationError(f"scenario wallet {name!r} is not defined")
        return self.wallets[name]

    def run(self) -> dict:
        for op in self.scenario.get("script", []):
            kind = op["op"]
            handler = getattr(self, f"_op_{kind}", None)
            if handler is None:
                raise ValidationError(f"unknown scenario op {kind!r}")
            handler(op)
        return {
            "name": self.scenario.get("name", "scenario"),
            "events": self.events,
            "final": self.network.snapshot(),
            "state_hash": self.network.state_hash(),
        }

    def _op_put(self, op: dict) -> None:
        wallet = self._wallet(op["wallet"])
        accepted = self.network.put(int(op["peer"]), wallet.doc_bytes)
        self.events.append(
            {"op": "put", "peer": op["peer"], "wallet": wallet.name, "accepted": accepted}
        )

    def _op_bind(self, op: dict) -> None:
        wallet = self._wallet(op["wallet"])
        ident = str(op["identifier"])
        binding = make_binding(
            wallet.signing_seed,
            identifier_hash(ident),
            wallet.address,
            doc_version=1,
        )
        accepted = self.network.bind_identifier(int(op["peer"]), binding, wallet.doc_bytes)
        self.events.append(
            {"op": "bind", "peer": op["peer"], "identifier": ident, "accepted": accepted}
        )

    def _op_get(self, op: dict) -> None:
        wallet = self._wallet(op["wallet"])
        try:
            data = self.network.get(
                int(op["peer"]), record_key_for_address(wallet.address)
            )
            found, size = True, len(data)
        except NotFoundError:
            found, size = False, 0
        self.events.append(
            {"op": "get", "peer": op["peer"], "wallet": wallet.name, "found": found, "size": size}
        )

    def _op_resolve(self, op: dict) -> None:
        try:
            address = self.network.resolve(int(op["peer"]), str(op["identifier"]))
            result = address.hex()
        except NotFoundError:
            result = None
        self.events.append(
            {"op": "resolve", "peer": op["peer"], "identifier": op["identifier"], "address": result}
        )

    def _op_step(self, op: dict) -> None:
        for _ in range(int(op.get("count", 1))):
            report = self.network.step()
            self.events.append(self._compact(report))

    def _op_flush(self, op: dict) -> None:
        for report in self.network.flush(int(op.get("max_rounds", 64))):
            self.events.append(self._compact(report))

    def _op_flood(self, op: dict) -> None:
        rng = random.Random(int(op.get("seed", 0))).randbytes
        count = int(op["count"])
        size = int(op.get("size_bytes", 204800))
        peers = list(self.network.peers)
        accepted = 0
        names = []
        for i in range(count):
            wallet = craft_flood_document(rng, size)
            wallet.name = f"{op.get('prefix', 'flood')}-{i}"
            self.wallets[wallet.name] = wallet
            names.append(wallet.name)
            origin = int(op["peer"]) if "peer" in op else peers[i % len(peers)]
            if self.network.put(origin, wallet.doc_bytes):
                accepted += 1
        self.events.append(
            {"op": "flood", "count": count, "size_bytes": size, "accepted": accepted, "names": names}
        )

    @staticmethod
    def _compact(report: dict) -> dict:
        return {
            "op": "step",
            "round": report["round"],
            "delivered": report["delivered"],
            "dropped": report["dropped"],
            "accepted": len(report["accepted"]),
            "rejected": len(report["rejected"]),
            "evicted": len(report["evicted"]),
        }


def run_scenario_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        scenario = json.load(fh)
    return ScenarioRunner(scenario).run()
