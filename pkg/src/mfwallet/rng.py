"""Injectable entropy source: a callable returning n random bytes.

Production code passes `secrets.token_bytes`; tests pass
`random.Random(seed).randbytes` for reproducibility.
"""

from typing import Callable

Rng = Callable[[int], bytes]
