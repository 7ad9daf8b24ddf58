"""Seedable, platform-stable pseudo-random and hashing primitives.

Reproducibility of simulated trials and retention sampling is an audit
requirement, so the generators are pinned to exact public algorithms
rather than to whatever the host runtime ships:

  * xoshiro256** (Blackman & Vigna) seeded through splitmix64 — the
    stream generator behind `shadow.simulate_stream`,
  * 64-bit FNV-1a — the stateless hash behind per-unit retention
    decisions.

Same seed, same platform-independent output, byte for byte.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3


def splitmix64_stream(seed: int):
    """Yield the splitmix64 output sequence for a 64-bit seed."""
    x = seed & MASK64
    while True:
        x = (x + 0x9E3779B97F4A7C15) & MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        yield (z ^ (z >> 31)) & MASK64


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator with splitmix64 state expansion.

    One 64-bit seed fully determines the stream; identical seeds produce
    identical streams on every platform.
    """

    def __init__(self, seed: int):
        sm = splitmix64_stream(seed)
        self._s = [next(sm), next(sm), next(sm), next(sm)]

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def bernoulli(self, p: float) -> bool:
        """One draw with success probability p; always consumes one output."""
        return self.random() < p


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV64_PRIME) & MASK64
    return h


def unit_fraction(unit_id: str, seed: int) -> float:
    """Map (unit_id, seed) to a stable value in [0, 1).

    FNV-1a over the UTF-8 unit id followed by the seed as 8 big-endian
    bytes, divided by 2^64. Each unit's value is independently
    reproducible regardless of processing order.
    """
    payload = unit_id.encode("utf-8") + (seed & MASK64).to_bytes(8, "big")
    return fnv1a64(payload) / 2.0 ** 64
