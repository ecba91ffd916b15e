"""Deterministic pseudo-random streams shared by every scheduler.

The generator is a subtractive lagged-Fibonacci generator (Knuth's
additive-sequence family, the same recurrence used by .NET's
``System.Random``): x[n] = x[n-55] - x[n-34] (mod 2**31 - 1).  It runs on
pure integer arithmetic, so a given seed produces the identical stream on
every platform and Python build, which is what makes golden-file tests and
cross-host reproduction possible.  Draws are produced in blocks (the
recurrence vectorises in chunks of 34) and handed out from a buffer; the
batched methods below exist because the schedulers consume tens of
thousands of draws per solve.

One instance is owned by exactly one solver run; streams are never shared
between threads.
"""
from __future__ import annotations

import hashlib
import math

import numpy as np

MBIG = 2147483647  # 2**31 - 1
MSEED = 161803398

_BUFFER_DRAWS = 2200  # refill granularity; any multiple of 55 works
_SCALE = 1.0 / MBIG


def fold_seed(seed: int) -> int:
    """Fold an arbitrary 64-bit (or wider) integer seed into [0, 2**31)."""
    u = seed & 0xFFFFFFFFFFFFFFFF
    return (u ^ (u >> 32)) & 0x7FFFFFFF


class SubtractiveRandom:
    """Reproducible uniform source with integer, float and normal draws."""

    __slots__ = ("_state", "_buf", "_pos", "_gauss_next")

    def __init__(self, seed: int = 0):
        folded = fold_seed(int(seed))
        arr = [0] * 56  # 1-based ring, index 0 unused
        mj = (MSEED - folded) % MBIG
        arr[55] = mj
        mk = 1
        for i in range(1, 55):
            ii = (21 * i) % 55
            arr[ii] = mk
            mk = mj - mk
            if mk < 0:
                mk += MBIG
            mj = arr[ii]
        for _ in range(4):
            for i in range(1, 56):
                arr[i] -= arr[1 + (i + 30) % 55]
                if arr[i] < 0:
                    arr[i] += MBIG
        # The pointer walk reads slots 1..55 starting at 1 with a +21
        # offset, which in generation order is x[n] = x[n-55] - x[n-34];
        # seed the linear history accordingly: the value at walk position
        # p (1-based) is consumed as history element p.
        self._state = np.array(arr[1:], dtype=np.int64)
        self._buf = np.empty(0, dtype=np.float64)
        self._pos = 0
        self._gauss_next: float | None = None

    def _refill(self) -> None:
        state = self._state
        work = np.empty(55 + _BUFFER_DRAWS, dtype=np.int64)
        work[:55] = state
        filled = 55
        end = len(work)
        while filled < end:
            # Chunks are capped at the short lag so no element in a chunk
            # depends on another element of the same chunk.
            chunk = min(34, end - filled)
            dst = work[filled : filled + chunk]
            np.subtract(
                work[filled - 55 : filled - 55 + chunk],
                work[filled - 34 : filled - 34 + chunk],
                out=dst,
            )
            np.add(dst, MBIG, out=dst, where=dst < 0)
            filled += chunk
        self._state = work[-55:].copy()
        self._buf = work[55:] * _SCALE
        self._pos = 0

    def take_array(self, count: int) -> np.ndarray:
        """Consume exactly ``count`` draws as a float64 array in [0, 1).

        Returns a view into the stream buffer whenever possible; the view
        stays valid because refills allocate fresh buffers.
        """
        buf = self._buf
        pos = self._pos
        end = pos + count
        if end <= len(buf):
            self._pos = end
            return buf[pos:end]
        parts = [buf[pos:]]
        need = count - len(parts[0])
        while need > 0:
            self._refill()
            take = min(need, len(self._buf))
            parts.append(self._buf[:take])
            self._pos = take
            need -= take
        return np.concatenate(parts)

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        pos = self._pos
        buf = self._buf
        if pos >= len(buf):
            self._refill()
            pos = 0
            buf = self._buf
        self._pos = pos + 1
        return float(buf[pos])

    def floats(self, count: int) -> list[float]:
        """``count`` uniform floats in [0, 1), in stream order."""
        return self.take_array(count).tolist()

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi]."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + int(self.random() * (hi - lo + 1))

    def randints(self, lo: int, hi: int, count: int) -> list[int]:
        """``count`` uniform integers in [lo, hi], one stream draw each."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        return [lo + int(f * span) for f in self.take_array(count).tolist()]

    def min_randint(self, lo: int, hi: int, count: int) -> int:
        """Minimum of ``count`` uniform integers in [lo, hi].

        Consumes exactly ``count`` draws and equals
        ``min(self.randint(lo, hi) for _ in range(count))`` because the
        float-to-integer decoding is monotone.
        """
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + int(float(self.take_array(count).min()) * (hi - lo + 1))

    def choice(self, seq):
        return seq[int(self.random() * len(seq))]

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Normal draw via the Marsaglia polar method."""
        cached = self._gauss_next
        if cached is not None:
            self._gauss_next = None
            return mu + sigma * cached
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                break
        factor = math.sqrt(-2.0 * math.log(s) / s)
        self._gauss_next = v * factor
        return mu + sigma * (u * factor)


def seeded_rng(seed: int) -> SubtractiveRandom:
    """Build the deterministic stream used by a single solver run."""
    return SubtractiveRandom(seed)


def derive_seed(base: int, *parts: object) -> int:
    """Derive a child seed from a base seed and a label path.

    Stable across runs and platforms (blake2b of the textual path), so
    per-slot and per-scheme streams stay deterministic regardless of
    execution order.
    """
    text = repr((int(base),) + tuple(parts)).encode("utf-8")
    digest = hashlib.blake2b(text, digest_size=8).digest()
    return int.from_bytes(digest, "big") & 0x7FFFFFFFFFFFFFFF
