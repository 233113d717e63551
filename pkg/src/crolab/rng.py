"""Deterministic random streams shared by both engine backends.

The generator is xoshiro256** seeded through splitmix64.  The compiled kernel
implements the identical algorithm, so a given seed produces the same variate
sequence on either backend and a run can be replayed bit for bit.
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

# 2^-53; uniforms carry the top 53 bits of a 64-bit word
_U53 = 1.0 / 9007199254740992.0


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def mix64(value: int) -> int:
    """One splitmix64 output for `value`; used as a stateless hash step."""
    return _splitmix64(value & _MASK64)[1]


def derive_seed(master_seed: int, *components: int) -> int:
    """Derive an independent 64-bit stream seed from a master seed.

    Components (e.g. variant code, function index, run index) are folded in
    one at a time, so distinct runs get non-interleaving streams and any cell
    of an experiment can be reproduced in isolation.
    """
    h = mix64(master_seed)
    for part in components:
        h = mix64(h ^ (part & _MASK64))
    return h


class RandomSource:
    """Replayable uniform stream: same seed, same sequence, forever."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        state, self._s0 = _splitmix64(state)
        state, self._s1 = _splitmix64(state)
        state, self._s2 = _splitmix64(state)
        state, self._s3 = _splitmix64(state)
        if self._s0 == self._s1 == self._s2 == self._s3 == 0:
            self._s0 = _GOLDEN  # all-zero state would lock xoshiro at zero

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        r = (s1 * 5) & _MASK64
        r = ((r << 7) | (r >> 57)) & _MASK64
        result = (r * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def uniform(self) -> float:
        """Next uniform variate on [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * _U53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + self.uniform() * (hi - lo)

    def index_below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        i = int(self.uniform() * n)
        return n - 1 if i >= n else i
