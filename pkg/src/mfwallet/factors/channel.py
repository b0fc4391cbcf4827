"""Out-of-band delivery seam for OOBA codes.

The mock inbox keeps only the most recent code per address, matching how a
user reads the latest email and earlier codes stop working.
"""

import threading
from typing import Protocol


class OutOfBandChannel(Protocol):
    def send(self, address: str, code: str) -> None: ...

    def latest(self, address: str) -> str | None: ...


class MockInbox:
    """In-memory single-slot inbox per address; safe for concurrent use."""

    def __init__(self):
        self._codes: dict[str, str] = {}
        self._lock = threading.Lock()

    def send(self, address: str, code: str) -> None:
        with self._lock:
            self._codes[address.strip().lower()] = code

    def latest(self, address: str) -> str | None:
        with self._lock:
            return self._codes.get(address.strip().lower())
