"""Brute-force reference implementations.

Everything here works directly on a materialized prefix of the fixed point
and shares no code with the automaton pipeline; tests use these as ground
truth and the CLI exposes them behind --check.
"""
from __future__ import annotations

import numpy as np

from .errors import InconclusiveError, InsufficientDataError
from .morphisms import Morphism, Word


def _distinct_int64(values: np.ndarray) -> int:
    """Distinct count, fast when the value set is small: learn candidates from
    a prefix, then verify membership vectorized; grow the set as needed."""
    if values.size <= 4096:
        return int(np.unique(values).size)
    known = np.unique(values[:4096])
    while True:
        pos = np.searchsorted(known, values)
        pos[pos == known.size] = 0
        fresh = values[known[pos] != values]
        if fresh.size == 0:
            return int(known.size)
        known = np.union1d(known, np.unique(fresh))


class PrefixBuffer:
    """A growable prefix of a fixed point with cumulative per-letter counts."""

    def __init__(self, f: Morphism, a: str, initial: int = 1 << 12):
        self.f = f
        self.a = a
        self.alphabet = f.domain
        self._data = np.empty(0, dtype=np.uint8)
        self._cum = None
        self._packed = None
        self.ensure(initial)

    def __len__(self) -> int:
        return len(self._data)

    def ensure(self, n: int) -> None:
        if len(self._data) >= n:
            return
        enc = self.f._fixed_point_encoded(self.a, n)
        self._data = np.frombuffer(enc.encode("utf-32-le"), dtype=np.uint32).astype(np.uint8)
        k = len(self.alphabet)
        onehot = np.zeros((len(self._data) + 1, k), dtype=np.int64)
        onehot[1:] = np.eye(k, dtype=np.int64)[self._data]
        self._cum = np.cumsum(onehot, axis=0)
        # counts packed into 20-bit fields so window Parikh vectors compare
        # with a single int64 subtraction (only valid for <= 3 letters)
        if k <= 3:
            self._packed = sum(self._cum[:, b] << (20 * b) for b in range(k))
        else:
            self._packed = None

    def ids(self, n: int) -> np.ndarray:
        self.ensure(n)
        return self._data[:n]

    def word(self, n: int) -> Word:
        return Word(self.alphabet, tuple(int(i) for i in self.ids(n)))

    def prefix_count(self, letter: str, n: int) -> int:
        """Occurrences of ``letter`` in the length-``n`` prefix."""
        self.ensure(n)
        return int(self._cum[n, self.alphabet.index(letter)])

    def window_count(self, letter: str, i: int, n: int) -> int:
        """Occurrences of ``letter`` in positions [i, i+n)."""
        self.ensure(i + n)
        b = self.alphabet.index(letter)
        return int(self._cum[i + n, b] - self._cum[i, b])

    def _distinct_window_vectors(self, n: int, limit: int) -> int:
        """Number of distinct Parikh vectors among windows of length n within
        the first ``limit`` positions."""
        self.ensure(limit)
        if n == 0:
            return 1
        if n > limit:
            raise InsufficientDataError(f"window {n} longer than buffer {limit}")
        k = len(self.alphabet)
        if self._packed is not None:
            # window counts stay below 2^20, so the packed difference is a
            # bijective encoding of the window's Parikh vector
            diffs = self._packed[n : limit + 1] - self._packed[: limit + 1 - n]
            return _distinct_int64(diffs)
        cols = [self._cum[n : limit + 1, b] - self._cum[: limit + 1 - n, b] for b in range(k)]
        code = np.zeros(len(cols[0]), dtype=np.int64)
        stride = 1
        for col in cols:
            lo, hi = int(col.min()), int(col.max())
            code += (col - lo) * stride
            stride *= hi - lo + 1
        return _distinct_int64(code)


def brute_abelian(buffer: PrefixBuffer, n: int, start: int | None = None) -> int:
    """Number of distinct Parikh vectors among length-n factors.

    Counts within a window of the fixed point of length max(64n, 1e4) and
    requires the doubled window to agree (no new vectors); keeps doubling on
    disagreement, giving up after two extra rounds.
    """
    if n == 0:
        return 1
    limit = start if start is not None else max(64 * n, 10_000)
    for _ in range(3):
        buffer.ensure(2 * limit)
        if buffer._packed is not None:
            codes = buffer._packed[n : 2 * limit + 1] - buffer._packed[: 2 * limit + 1 - n]
        else:
            k = len(buffer.alphabet)
            cols = [
                buffer._cum[n : 2 * limit + 1, b] - buffer._cum[: 2 * limit + 1 - n, b]
                for b in range(k)
            ]
            codes = np.zeros(len(cols[0]), dtype=np.int64)
            stride = 1
            for col in cols:
                lo, hi = int(col.min()), int(col.max())
                codes += (col - lo) * stride
                stride *= hi - lo + 1
        first = limit + 1 - n
        known = np.unique(codes[: min(4096, first)])
        while True:  # exact vector set of the first window
            pos = np.searchsorted(known, codes[:first])
            pos[pos == known.size] = 0
            fresh = codes[:first][known[pos] != codes[:first]]
            if fresh.size == 0:
                break
            known = np.union1d(known, np.unique(fresh))
        pos = np.searchsorted(known, codes)
        pos[pos == known.size] = 0
        if not (known[pos] != codes).any():
            # the doubled window introduces no new vector: rounds agree
            return int(known.size)
        limit *= 2
    raise InconclusiveError(f"abelian count for n={n} did not stabilize at buffer {limit}")


def brute_abelian_range(buffer: PrefixBuffer, n_max: int) -> list[int]:
    """brute_abelian for every n <= n_max (shares the buffer across lengths)."""
    buffer.ensure(2 * max(64 * n_max, 10_000))
    return [brute_abelian(buffer, n) for n in range(n_max + 1)]


def brute_cuts(f: Morphism, a: str, limit: int) -> list[int]:
    """All cutting points <= limit, straight from the definition: the sorted
    distinct values of |f(prefix of the fixed point)|."""
    lens = np.array([len(w) for w in f.images], dtype=np.int64)
    n = max(64, limit)
    while True:
        enc = f._fixed_point_encoded(a, n)
        ids = np.frombuffer(enc.encode("utf-32-le"), dtype=np.uint32)
        sums = np.concatenate([[0], np.cumsum(lens[ids])])
        if int(sums[-1]) > limit:
            return sorted(set(int(v) for v in sums if v <= limit))
        n *= 4


def brute_prefix_counts(buffer: PrefixBuffer, letter: str, n: int) -> int:
    return buffer.prefix_count(letter, n)


def brute_factors(buffer: PrefixBuffer, m: int) -> set[str]:
    """The set of length-m factors, with the same doubling stabilization
    policy as brute_abelian."""
    if m == 0:
        return {""}

    def scan(limit: int) -> set[str]:
        ids = buffer.ids(limit)
        text = "".join(chr(48 + int(i)) for i in ids)
        return {text[i : i + m] for i in range(limit - m + 1)}

    limit = max(64 * m, 10_000)
    prev = scan(limit)
    for _ in range(3):
        limit *= 2
        cur = scan(limit)
        if cur == prev:
            names = buffer.alphabet.letters
            if all(len(x) == 1 for x in names):
                return {"".join(names[ord(c) - 48] for c in w) for w in cur}
            return {" ".join(names[ord(c) - 48] for c in w) for w in cur}
        prev = cur
    raise InconclusiveError(f"factor set for m={m} did not stabilize")
