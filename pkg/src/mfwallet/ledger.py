"""Minimal account-balance chain standing in for a real network.

Deterministic Ed25519 keypairs come from the wallet's signing seed; the
address is the first 20 bytes of SHA-256 over the verification key.
Transfers carry the sender's verification key so anyone can check that the
key hashes to the `from` address and the signature covers the canonical
transfer bytes. Amounts are integer base units; 1 coin = 10^6 units.
"""

import json
import threading
from dataclasses import dataclass, field

from . import keys
from .errors import (
    BadNonceError,
    BadSignatureError,
    FaucetDisabledError,
    InsufficientFundsError,
    ValidationError,
)

UNITS_PER_COIN = 10**6

keypair_from_seed = keys.keypair_from_seed


@dataclass
class LedgerAccount:
    address: bytes
    balance: int = 0
    nonce: int = 0


@dataclass(frozen=True)
class Transfer:
    sender: bytes
    recipient: bytes
    amount: int
    nonce: int
    verification_key: bytes
    signature: bytes = b""

    def signing_payload(self) -> bytes:
        return json.dumps(
            {
                "amount": self.amount,
                "from": self.sender.hex(),
                "nonce": self.nonce,
                "to": self.recipient.hex(),
            },
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")


def sign_transfer(
    signing_seed: bytes, recipient: bytes, amount: int, nonce: int
) -> Transfer:
    sk, vk, address = keypair_from_seed(signing_seed)
    unsigned = Transfer(
        sender=address,
        recipient=recipient,
        amount=amount,
        nonce=nonce,
        verification_key=vk,
    )
    return Transfer(
        sender=address,
        recipient=recipient,
        amount=amount,
        nonce=nonce,
        verification_key=vk,
        signature=sk.sign(unsigned.signing_payload()),
    )


@dataclass
class Ledger:
    faucet_enabled: bool = False
    accounts: dict[bytes, LedgerAccount] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def _account(self, address: bytes) -> LedgerAccount:
        if address not in self.accounts:
            self.accounts[address] = LedgerAccount(address=address)
        return self.accounts[address]

    def balance(self, address: bytes) -> int:
        with self._lock:
            acct = self.accounts.get(address)
            return acct.balance if acct else 0

    def next_nonce(self, address: bytes) -> int:
        with self._lock:
            acct = self.accounts.get(address)
            return (acct.nonce if acct else 0) + 1

    def total_supply(self) -> int:
        with self._lock:
            return sum(a.balance for a in self.accounts.values())

    def fund(self, address: bytes, amount: int) -> None:
        """Test faucet: credit without a signature. Disabled by default."""
        if not self.faucet_enabled:
            raise FaucetDisabledError("faucet is disabled")
        if amount < 0:
            raise ValidationError("faucet amount must be >= 0")
        if len(address) != keys.ADDRESS_LEN:
            raise ValidationError("address must be 20 bytes")
        with self._lock:
            self._account(address).balance += amount

    def submit_transfer(self, transfer: Transfer) -> None:
        """Apply a transfer atomically; raises a distinct error per rejection."""
        if transfer.amount < 0:
            raise ValidationError("amount must be >= 0")
        if keys.address_from_verify_key(transfer.verification_key) != transfer.sender:
            raise BadSignatureError("verification key does not match sender address")
        if not keys.verify(
            transfer.verification_key, transfer.signature, transfer.signing_payload()
        ):
            raise BadSignatureError("signature does not verify")
        with self._lock:
            sender = self._account(transfer.sender)
            if transfer.nonce != sender.nonce + 1:
                raise BadNonceError(
                    f"expected nonce {sender.nonce + 1}, got {transfer.nonce}"
                )
            if sender.balance < transfer.amount:
                raise InsufficientFundsError(
                    f"balance {sender.balance} < amount {transfer.amount}"
                )
            sender.balance -= transfer.amount
            sender.nonce += 1
            self._account(transfer.recipient).balance += transfer.amount

    def to_json(self) -> dict:
        with self._lock:
            return {
                "faucet_enabled": self.faucet_enabled,
                "accounts": {
                    a.address.hex(): {"balance": a.balance, "nonce": a.nonce}
                    for a in self.accounts.values()
                },
            }

    @classmethod
    def from_json(cls, obj: dict) -> "Ledger":
        ledger = cls(faucet_enabled=bool(obj.get("faucet_enabled", False)))
        for addr_hex, state in obj.get("accounts", {}).items():
            address = bytes.fromhex(addr_hex)
            ledger.accounts[address] = LedgerAccount(
                address=address,
                balance=int(state["balance"]),
                nonce=int(state["nonce"]),
            )
        return ledger
