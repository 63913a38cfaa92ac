"""Counter-based deterministic generator: blake2b over (seed, stream, counter)."""

from __future__ import annotations

import hashlib
import struct

ALGORITHM = "blake2b-counter-v1"


class CounterRng:
    """Each draw hashes "seed:stream:counter"; no hidden state besides the counter."""

    def __init__(self, seed: int, stream: str = "main"):
        self.seed = seed
        self.stream = stream
        self.counter = 0

    def next_u64(self) -> int:
        msg = f"{self.seed}:{self.stream}:{self.counter}".encode()
        self.counter += 1
        return struct.unpack("<Q", hashlib.blake2b(msg, digest_size=8).digest())[0]

    def random(self) -> float:
        return (self.next_u64() >> 11) / float(1 << 53)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    def bernoulli(self, p: float) -> bool:
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return self.random() < p

    def child(self, stream: str) -> "CounterRng":
        return CounterRng(self.seed, f"{self.stream}/{stream}")
