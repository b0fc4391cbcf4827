"""Simulated HMAC-SHA1 challenge-response token (YubiKey-style)."""

import hashlib
import hmac
from dataclasses import dataclass, field

RESPONSE_LEN = 20
SECRET_LEN = 20


@dataclass(frozen=True)
class SimulatedToken:
    """Stateless hardware token: response = HMAC-SHA1(secret, challenge)."""

    secret: bytes = field(repr=False)

    def __post_init__(self):
        if len(self.secret) != SECRET_LEN:
            raise ValueError("token secret must be 20 bytes")

    def respond(self, challenge: bytes) -> bytes:
        return hmac.new(self.secret, challenge, hashlib.sha1).digest()


def token_respond(token: SimulatedToken, challenge: bytes) -> bytes:
    return token.respond(challenge)
