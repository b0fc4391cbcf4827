"""HOTP (RFC 4226) and TOTP (RFC 6238) code generation.

HMAC-SHA1 with dynamic truncation; TOTP is HOTP over the time-step counter.
"""

import hashlib
import hmac
import struct


def hotp_code(key: bytes, counter: int, digits: int = 6) -> str:
    """RFC 4226 HOTP: dynamic truncation of HMAC-SHA1(key, counter)."""
    if len(key) < 16:
        raise ValueError("OTP key must be at least 16 bytes")
    if counter < 0:
        raise ValueError("counter must be non-negative")
    if not 4 <= digits <= 9:
        raise ValueError("digits must be in [4, 9]")
    mac = hmac.new(key, struct.pack(">Q", counter), hashlib.sha1).digest()
    offset = mac[-1] & 0x0F
    code = struct.unpack(">I", mac[offset : offset + 4])[0] & 0x7FFFFFFF
    return str(code % 10**digits).zfill(digits)


def totp_counter(unix_time: int, step: int = 30) -> int:
    if step <= 0:
        raise ValueError("step must be positive")
    return unix_time // step


def totp_code(key: bytes, unix_time: int, step: int = 30, digits: int = 6) -> str:
    """RFC 6238 TOTP: HOTP over floor(unix_time / step)."""
    return hotp_code(key, totp_counter(unix_time, step), digits)
