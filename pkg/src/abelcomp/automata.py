"""Deterministic multi-track automata over base-k digit tuples.

Conventions, fixed once for the whole package:

* representations are msd-first; a tuple of naturals is fed to an automaton
  by writing each component in base k, padding all components with leading
  zeros to a common length, and reading the resulting digit tuples;
* every automaton is complete and deterministic, and its language is closed
  under adding/removing leading all-zero tuples, so acceptance of a tuple of
  naturals does not depend on the amount of padding (after minimization this
  shows up concretely as a zero-tuple self-loop on the initial state);
* a symbol is the integer encoding of one digit tuple, with the first track
  most significant: sym = sum(d[i] * k**(m-1-i)).

Operations align tracks by name and cylindrify with don't-care tracks as
needed; results carry the sorted union of the argument track names.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceLimitError

STATE_LIMIT = 2_000_000


def set_state_limit(n: int) -> None:
    global STATE_LIMIT
    STATE_LIMIT = int(n)


@lru_cache(maxsize=1024)
def _digit_table(base: int, m: int) -> np.ndarray:
    """(base**m, m) array: digits of every symbol, track 0 most significant."""
    syms = np.arange(base**m)
    cols = [(syms // base ** (m - 1 - i)) % base for i in range(m)]
    return np.stack(cols, axis=1) if m else np.zeros((1, 0), dtype=np.int64)


@lru_cache(maxsize=1024)
def _subsymbol_map(base: int, m: int, positions: tuple[int, ...]) -> np.ndarray:
    """Map each joint symbol to the symbol over the tracks at ``positions``."""
    digits = _digit_table(base, m)
    sub = len(positions)
    out = np.zeros(base**m, dtype=np.int64)
    for new, old in enumerate(positions):
        out += digits[:, old] * base ** (sub - 1 - new)
    return out


@lru_cache(maxsize=1024)
def _lift_map(base: int, m: int, kept_positions: tuple[int, ...]) -> np.ndarray:
    """(kept_alpha, removed_alpha) array of joint symbols realizing each
    kept-symbol with every assignment of the removed tracks."""
    kept = kept_positions
    removed = tuple(i for i in range(m) if i not in kept)
    ka, ra = base ** len(kept), base ** len(removed)
    jk = np.arange(ka)[:, None]
    jr = np.arange(ra)[None, :]
    joint = np.zeros((ka, ra), dtype=np.int64)
    for new, old in enumerate(kept):
        joint = joint + ((jk // base ** (len(kept) - 1 - new)) % base) * base ** (m - 1 - old)
    for new, old in enumerate(removed):
        joint = joint + ((jr // base ** (len(removed) - 1 - new)) % base) * base ** (m - 1 - old)
    return joint


def _ndigits(base: int, v: int) -> int:
    n = 0
    while v:
        v //= base
        n += 1
    return n


class Automaton:
    """Complete DFA over base-k digit tuples with named tracks."""

    __slots__ = ("base", "tracks", "n_states", "initial", "delta", "accepting")

    def __init__(self, base, tracks, initial, delta, accepting):
        if base < 2:
            raise InputError(f"base must be >= 2, got {base}")
        self.base = int(base)
        self.tracks = tuple(tracks)
        if len(set(self.tracks)) != len(self.tracks):
            raise InputError(f"duplicate track names {self.tracks}")
        self.delta = np.asarray(delta, dtype=np.int32)
        self.n_states = self.delta.shape[0]
        self.initial = int(initial)
        self.accepting = np.asarray(accepting, dtype=bool)
        alpha = self.base ** len(self.tracks)
        if self.delta.shape != (self.n_states, alpha):
            raise InputError("transition table has wrong shape")
        if self.accepting.shape != (self.n_states,):
            raise InputError("accepting vector has wrong shape")
        if self.n_states == 0 or not (0 <= self.initial < self.n_states):
            raise InputError("initial state out of range")
        if self.n_states and (self.delta.min() < 0 or self.delta.max() >= self.n_states):
            raise InputError("transition target out of range")

    # -- basic queries ----------------------------------------------------

    @property
    def alphabet_size(self) -> int:
        return self.base ** len(self.tracks)

    def __repr__(self) -> str:
        return (
            f"Automaton(base={self.base}, tracks={list(self.tracks)}, "
            f"states={self.n_states})"
        )

    def encode_symbol(self, digits: Sequence[int]) -> int:
        sym = 0
        for d in digits:
            sym = sym * self.base + int(d)
        return sym

    def _symbols_for(self, values: Sequence[int]) -> list[int]:
        if len(values) != len(self.tracks):
            raise InputError(f"expected {len(self.tracks)} values, got {len(values)}")
        if any(v < 0 for v in values):
            raise InputError("only natural numbers are representable")
        length = max((_ndigits(self.base, v) for v in values), default=0)
        syms = []
        for pos in range(length - 1, -1, -1):
            power = self.base**pos
            syms.append(self.encode_symbol([(v // power) % self.base for v in values]))
        return syms

    def run(self, symbols: Iterable[int]) -> int:
        q = self.initial
        for s in symbols:
            q = int(self.delta[q, s])
        return q

    def accepts(self, *values: int) -> bool:
        return bool(self.accepting[self.run(self._symbols_for(values))])

    # -- track surgery ----------------------------------------------------

    def with_tracks(self, new_tracks: Sequence[str]) -> "Automaton":
        """Cylindrify/reorder onto ``new_tracks`` (a superset of this
        automaton's tracks); added tracks are don't-care."""
        new_tracks = tuple(new_tracks)
        if set(self.tracks) - set(new_tracks):
            raise InputError("with_tracks cannot drop tracks; use project_exists")
        if new_tracks == self.tracks:
            return self
        positions = tuple(new_tracks.index(t) for t in self.tracks)
        sub = _subsymbol_map(self.base, len(new_tracks), positions)
        return Automaton(self.base, new_tracks, self.initial, self.delta[:, sub], self.accepting)

    def rename_tracks(self, mapping: dict[str, str]) -> "Automaton":
        new = tuple(mapping.get(t, t) for t in self.tracks)
        return Automaton(self.base, new, self.initial, self.delta, self.accepting)

    # -- exports ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "kind": "automaton",
            "base": self.base,
            "msd": True,
            "tracks": list(self.tracks),
            "initial": self.initial,
            "accepting": [int(b) for b in self.accepting],
            "transitions": [[int(x) for x in row] for row in self.delta],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Automaton":
        if data.get("kind") != "automaton":
            raise InputError("not an automaton dump")
        if not data.get("msd", True):
            raise InputError("only msd-first automata are supported")
        return cls(
            data["base"],
            tuple(data["tracks"]),
            data["initial"],
            np.array(data["transitions"], dtype=np.int32),
            np.array(data["accepting"], dtype=bool),
        )

    def to_dot(self) -> str:
        digits = _digit_table(self.base, len(self.tracks))
        lines = ["digraph automaton {", "  rankdir=LR;", '  __start [shape=none, label=""];']
        for q in range(self.n_states):
            shape = "doublecircle" if self.accepting[q] else "circle"
            lines.append(f"  q{q} [shape={shape}, label=\"{q}\"];")
        lines.append(f"  __start -> q{self.initial};")
        for q in range(self.n_states):
            by_target: dict[int, list[str]] = {}
            for sym in range(self.alphabet_size):
                label = ",".join(str(int(d)) for d in digits[sym])
                by_target.setdefault(int(self.delta[q, sym]), []).append(label or "()")
            for tgt, labels in sorted(by_target.items()):
                text = " | ".join(labels)
                if len(text) > 60:
                    text = text[:57] + "..."
                lines.append(f'  q{q} -> q{tgt} [label="{text}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_walnut(self) -> str:
        header = " ".join([f"msd_{self.base}"] * max(1, len(self.tracks)))
        digits = _digit_table(self.base, len(self.tracks))
        lines = [header, ""]
        for q in range(self.n_states):
            lines.append(f"{q} {1 if self.accepting[q] else 0}")
            for sym in range(self.alphabet_size):
                dts = " ".join(str(int(d)) for d in digits[sym])
                lines.append(f"{dts} -> {int(self.delta[q, sym])}")
            lines.append("")
        return "\n".join(lines).rstrip() + "\n"

    # -- core constructions ------------------------------------------------

    def minimized(self) -> "Automaton":
        delta, init, part = _minimize_tables(self.delta, self.initial, self.accepting.astype(np.int64))
        return Automaton(self.base, self.tracks, init, delta, part.astype(bool))

    def complement(self) -> "Automaton":
        return Automaton(self.base, self.tracks, self.initial, self.delta, ~self.accepting)


def _minimize_tables(delta: np.ndarray, initial: int, labels: np.ndarray):
    """Trim + Moore partition refinement + canonical BFS renumbering.

    ``labels`` seeds the partition (acceptance bits for DFAs, output class
    ids for DFAOs).  Returns (delta', initial', label_per_state').
    """
    n, alpha = delta.shape
    # reachable trim
    seen = np.zeros(n, dtype=bool)
    seen[initial] = True
    frontier = np.array([initial])
    while frontier.size:
        nxt = np.unique(delta[frontier])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    keep = np.flatnonzero(seen)
    remap = -np.ones(n, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    delta = remap[delta[keep]]
    labels = labels[keep]
    initial = int(remap[initial])
    n = keep.size

    # refinement
    _, part = np.unique(labels, return_inverse=True)
    part = part.ravel().astype(np.int64)
    n_classes = int(part.max()) + 1 if n else 0
    while True:
        key = np.column_stack([part, part[delta]])
        _, new_part = np.unique(key, axis=0, return_inverse=True)
        new_part = new_part.ravel().astype(np.int64)
        count = int(new_part.max()) + 1
        if count == n_classes:
            part = new_part
            break
        part, n_classes = new_part, count

    # quotient (one representative row per class)
    reps = np.zeros(n_classes, dtype=np.int64)
    reps[part[::-1]] = np.arange(n - 1, -1, -1)
    qdelta = part[delta[reps]]
    qinit = int(part[initial])
    qlabels = labels[reps]

    # canonical numbering: BFS from the initial class, symbols ascending
    order = np.full(n_classes, -1, dtype=np.int64)
    order[qinit] = 0
    queue = [qinit]
    count = 1
    while queue:
        nxt = []
        for q in queue:
            for t in qdelta[q]:
                if order[t] < 0:
                    order[t] = count
                    count += 1
                    nxt.append(int(t))
        queue = nxt
    inv = np.argsort(order)
    new_delta = order[qdelta[inv]].astype(np.int32)
    new_labels = qlabels[inv]
    return new_delta, int(order[qinit]), new_labels


def _product(a: Automaton, b: Automaton, op: Callable, op_name: str) -> Automaton:
    if a.base != b.base:
        raise InputError(f"base mismatch: {a.base} vs {b.base}")
    tracks = tuple(sorted(set(a.tracks) | set(b.tracks)))
    m = len(tracks)
    proj_a = _subsymbol_map(a.base, m, tuple(tracks.index(t) for t in a.tracks))
    proj_b = _subsymbol_map(a.base, m, tuple(tracks.index(t) for t in b.tracks))
    nb = b.n_states
    start = a.initial * nb + b.initial
    index: dict[int, int] = {start: 0}
    codes = [start]
    rows = []
    qi = 0
    while qi < len(codes):
        pa, pb = divmod(codes[qi], nb)
        qi += 1
        succ = a.delta[pa][proj_a].astype(np.int64) * nb + b.delta[pb][proj_b]
        uniq = np.unique(succ)
        fresh = [c for c in uniq.tolist() if c not in index]
        if fresh:
            if len(index) + len(fresh) > STATE_LIMIT:
                raise ResourceLimitError(op_name, f"more than {STATE_LIMIT} product states")
            for c in fresh:
                index[c] = len(codes)
                codes.append(c)
        lut = np.fromiter((index[c] for c in uniq.tolist()), dtype=np.int32, count=uniq.size)
        rows.append(lut[np.searchsorted(uniq, succ)])
    code_arr = np.array(codes, dtype=np.int64)
    acc = op(a.accepting[code_arr // nb], b.accepting[code_arr % nb])
    return Automaton(a.base, tracks, 0, np.vstack(rows), acc)


def combine(op: str, a: Automaton, b: Automaton | None = None) -> Automaton:
    """Boolean combination; track sets are unified by cylindrification."""
    if op == "not":
        if b is not None:
            raise InputError("'not' takes a single automaton")
        return a.complement().minimized()
    if b is None:
        raise InputError(f"'{op}' needs two automata")
    fns = {
        "and": lambda x, y: x & y,
        "or": lambda x, y: x | y,
        "implies": lambda x, y: ~x | y,
        "iff": lambda x, y: x == y,
        "xor": lambda x, y: x != y,
    }
    if op not in fns:
        raise InputError(f"unsupported boolean operation {op!r}")
    return _product(a, b, fns[op], op).minimized()


def project_exists(a: Automaton, var: str | Sequence[str]) -> Automaton:
    """Existentially quantify one or more tracks (erase, re-determinize,
    close under leading zeros, minimize)."""
    names = (var,) if isinstance(var, str) else tuple(var)
    for t in names:
        if t not in a.tracks:
            raise InputError(f"unknown track {t!r}")
    kept = tuple(t for t in a.tracks if t not in names)
    kept_pos = tuple(a.tracks.index(t) for t in kept)
    lift = _lift_map(a.base, len(a.tracks), kept_pos)
    ka = lift.shape[0]

    # leading-zero closure of the initial state: anything reachable while the
    # kept tracks read 0 may serve as a start state
    closure = {a.initial}
    frontier = [a.initial]
    zero_syms = lift[0]
    while frontier:
        nxt = np.unique(a.delta[np.array(frontier)][:, zero_syms])
        fresh = [int(q) for q in nxt if int(q) not in closure]
        closure.update(fresh)
        frontier = fresh

    start = tuple(sorted(closure))
    index: dict[tuple, int] = {start: 0}
    order = [start]
    rows = []
    qi = 0
    while qi < len(order):
        subset = np.array(order[qi], dtype=np.int64)
        qi += 1
        block = a.delta[subset][:, lift]  # (|S|, ka, ra)
        row = np.empty(ka, dtype=np.int32)
        for j in range(ka):
            target = tuple(np.unique(block[:, j, :]).tolist())
            t = index.get(target)
            if t is None:
                if len(index) >= STATE_LIMIT:
                    raise ResourceLimitError("project_exists", f"more than {STATE_LIMIT} subset states")
                t = len(order)
                index[target] = t
                order.append(target)
            row[j] = t
        rows.append(row)
    acc = np.array([bool(a.accepting[list(s)].any()) for s in order])
    return Automaton(a.base, kept, 0, np.vstack(rows), acc).minimized()


# -- decision procedures ---------------------------------------------------


def is_empty(a: Automaton) -> bool:
    seen = np.zeros(a.n_states, dtype=bool)
    seen[a.initial] = True
    frontier = np.array([a.initial])
    while frontier.size:
        if a.accepting[frontier].any():
            return False
        nxt = np.unique(a.delta[frontier])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return True


def equivalent(a: Automaton, b: Automaton) -> bool:
    """Language equality via emptiness of the symmetric difference."""
    if set(a.tracks) != set(b.tracks):
        all_tracks = tuple(sorted(set(a.tracks) | set(b.tracks)))
        a, b = a.with_tracks(all_tracks), b.with_tracks(all_tracks)
    return is_empty(_product(a, b, lambda x, y: x != y, "equivalent"))


def _canonical_filter(base: int, tracks: tuple[str, ...]) -> Automaton:
    """Accepts exactly the canonical digit words: empty, or starting with a
    non-zero tuple."""
    alpha = base ** len(tracks)
    delta = np.zeros((3, alpha), dtype=np.int32)
    delta[0] = 1
    delta[0, 0] = 2
    delta[1] = 1
    delta[2] = 2
    return Automaton(base, tracks, 0, delta, np.array([True, True, False]))


def is_finite(a: Automaton) -> bool:
    """True iff the accepted set of tuples is finite."""
    prod = _product(a, _canonical_filter(a.base, a.tracks), lambda x, y: x & y, "is_finite")
    # trim to states both reachable and co-reachable, then look for a cycle
    n = prod.n_states
    reach = np.zeros(n, dtype=bool)
    reach[prod.initial] = True
    frontier = np.array([prod.initial])
    while frontier.size:
        nxt = np.unique(prod.delta[frontier])
        nxt = nxt[~reach[nxt]]
        reach[nxt] = True
        frontier = nxt
    preds: list[set[int]] = [set() for _ in range(n)]
    for q in np.flatnonzero(reach):
        for t in np.unique(prod.delta[q]):
            preds[int(t)].add(int(q))
    co = prod.accepting.copy() & reach
    frontier2 = list(np.flatnonzero(co))
    while frontier2:
        q = frontier2.pop()
        for p in preds[q]:
            if not co[p]:
                co[p] = True
                frontier2.append(p)
    keep = reach & co
    # DFS cycle detection on the kept subgraph
    color = np.zeros(n, dtype=np.int8)  # 0 white, 1 on stack, 2 done
    for root in np.flatnonzero(keep):
        if color[root]:
            continue
        stack = [(int(root), iter(np.unique(prod.delta[root]).tolist()))]
        color[root] = 1
        while stack:
            q, it = stack[-1]
            advanced = False
            for t in it:
                t = int(t)
                if not keep[t]:
                    continue
                if color[t] == 1:
                    return False
                if color[t] == 0:
                    color[t] = 1
                    stack.append((t, iter(np.unique(prod.delta[t]).tolist())))
                    advanced = True
                    break
            if not advanced:
                color[q] = 2
                stack.pop()
    return True


def enumerate_accepted(a: Automaton, bound: int, limit: int = 1_000_000) -> list[tuple[int, ...]]:
    """All accepted tuples with every component <= bound, sorted."""
    m = len(a.tracks)
    out = []
    if a.accepting[a.initial]:
        out.append((0,) * m)
    max_len = _ndigits(a.base, bound)
    digits = _digit_table(a.base, m)
    base = a.base
    for length in range(1, max_len + 1):
        # canonical words only: first symbol non-zero
        stack = [(a.initial, (0,) * m, 0)]
        while stack:
            q, vals, pos = stack.pop()
            first = pos == 0
            rem = length - pos - 1
            for sym in range(1 if first else 0, a.alphabet_size):
                nv = tuple(v * base + int(d) for v, d in zip(vals, digits[sym]))
                if any(v * base**rem > bound for v in nv):
                    continue
                t = int(a.delta[q, sym])
                if rem == 0:
                    if a.accepting[t]:
                        out.append(nv)
                        if len(out) >= limit:
                            raise ResourceLimitError("enumerate", f"more than {limit} tuples")
                else:
                    stack.append((t, nv, pos + 1))
    return sorted(out)


def enumerate_finite(a: Automaton, limit: int = 1_000_000) -> list[tuple[int, ...]]:
    """All accepted tuples of an automaton with finite language, sorted."""
    if not is_finite(a):
        raise InputError("enumerate_finite requires a finite language")
    # finite language: all canonical accepted words are shorter than the
    # number of states of the canonical product
    prod = _product(a, _canonical_filter(a.base, a.tracks), lambda x, y: x & y, "enumerate_finite")
    bound = a.base ** (prod.n_states + 1)
    return enumerate_accepted(a, bound, limit)


def eval_function(a: Automaton, fixed: dict[str, int], out_track: str) -> int | None:
    """Least value of ``out_track`` completing an accepted tuple with the
    remaining tracks fixed; None if no completion exists (with up to two
    extra output digits of slack)."""
    if out_track not in a.tracks:
        raise InputError(f"unknown track {out_track!r}")
    if set(fixed) != set(a.tracks) - {out_track}:
        raise InputError("fixed values must cover every track except the output")
    base = a.base
    positions = {t: i for i, t in enumerate(a.tracks)}
    out_weight = base ** (len(a.tracks) - 1 - positions[out_track])
    in_len = max((_ndigits(base, v) for v in fixed.values()), default=0)
    for length in range(in_len, in_len + 3):
        # symbol skeletons per position: all fixed digits placed, output digit 0
        skeleton = []
        for j in range(length):
            power = base ** (length - 1 - j)
            sym = 0
            for t, v in fixed.items():
                sym += ((v // power) % base) * base ** (len(a.tracks) - 1 - positions[t])
            skeleton.append(sym)
        reach = [None] * (length + 1)
        reach[length] = np.asarray(a.accepting, dtype=bool)
        ok = True
        for j in range(length - 1, -1, -1):
            syms = skeleton[j] + out_weight * np.arange(base)
            reach[j] = reach[j + 1][a.delta[:, syms]].any(axis=1)
        if not reach[0][a.initial]:
            continue
        q = a.initial
        value = 0
        for j in range(length):
            for d in range(base):
                t = int(a.delta[q, skeleton[j] + out_weight * d])
                if reach[j + 1][t]:
                    q = t
                    value = value * base + d
                    break
        return value
    return None


def least_accepted(a: Automaton, max_length: int | None = None) -> tuple[int, ...] | None:
    """The accepted tuple with the shortest canonical representation,
    lexicographically least among those; None if the language is empty.
    For a single track this is the least accepted natural."""
    if a.accepting[a.initial]:
        return (0,) * len(a.tracks)
    if max_length is None:
        max_length = a.n_states + 1
    # reach[r] = states that can reach acceptance in exactly r more symbols
    reach = [np.asarray(a.accepting, dtype=bool)]
    for _ in range(max_length):
        prev = reach[-1]
        reach.append(np.asarray(prev[a.delta].any(axis=1)))
    target = None
    for length in range(1, max_length + 1):
        # canonical: first symbol non-zero
        first = a.delta[a.initial, 1:]
        if reach[length - 1][first].any():
            target = length
            break
    if target is None:
        return None
    digits = _digit_table(a.base, len(a.tracks))
    q = a.initial
    values = (0,) * len(a.tracks)
    for pos in range(target):
        lo = 1 if pos == 0 else 0
        for sym in range(lo, a.alphabet_size):
            t = int(a.delta[q, sym])
            if reach[target - pos - 1][t]:
                q = t
                values = tuple(v * a.base + int(d) for v, d in zip(values, digits[sym]))
                break
    return values


def check_padding_invariance(a: Automaton, samples: Iterable[tuple[int, ...]] = ()) -> bool:
    """Initial state and its zero-tuple successor must accept the same
    language; optionally spot-checks explicit tuples with extra padding."""
    shifted = Automaton(a.base, a.tracks, int(a.delta[a.initial, 0]), a.delta, a.accepting)
    if not equivalent(a, shifted):
        return False
    for vals in samples:
        syms = a._symbols_for(vals)
        if bool(a.accepting[a.run(syms)]) != bool(a.accepting[a.run([0] + syms)]):
            return False
    return True


# -- builders ---------------------------------------------------------------


def _build(base, tracks, init_label, accept, step) -> Automaton:
    """Generic explicit-state builder: ``step(label, digit_tuple) -> label``."""
    m = len(tracks)
    digits = _digit_table(base, m)
    index = {init_label: 0}
    order = [init_label]
    rows = []
    qi = 0
    while qi < len(order):
        lab = order[qi]
        qi += 1
        row = []
        for sym in range(base**m):
            nxt = step(lab, tuple(int(d) for d in digits[sym]))
            t = index.get(nxt)
            if t is None:
                t = len(order)
                index[nxt] = t
                order.append(nxt)
            row.append(t)
        rows.append(row)
    acc = np.array([accept(lab) for lab in order], dtype=bool)
    return Automaton(base, tracks, 0, np.array(rows, dtype=np.int32), acc).minimized()


def true_automaton(base: int, tracks: Sequence[str]) -> Automaton:
    return _build(base, tuple(tracks), "t", lambda s: True, lambda s, d: s)


def false_automaton(base: int, tracks: Sequence[str]) -> Automaton:
    return _build(base, tuple(tracks), "f", lambda s: False, lambda s, d: s)


def eq_automaton(base: int, x: str, y: str) -> Automaton:
    def step(s, d):
        return s if s == "eq" and d[0] == d[1] else "dead"

    return _build(base, (x, y), "eq", lambda s: s == "eq", step)


def lt_automaton(base: int, x: str, y: str) -> Automaton:
    """Strict x < y."""

    def step(s, d):
        if s != "eq":
            return s
        if d[0] == d[1]:
            return "eq"
        return "lt" if d[0] < d[1] else "gt"

    return _build(base, (x, y), "eq", lambda s: s == "lt", step)


def add_automaton(base: int, x: str, y: str, z: str) -> Automaton:
    """x + y = z.  State is the anticipated carry into the digits already read."""

    def step(s, d):
        if s == "dead":
            return s
        a, b, c = d
        if s == 0:
            e = c - a - b
            return e if e in (0, 1) else "dead"
        e = a + b - c
        if e == base:
            return 0
        return 1 if e == base - 1 else "dead"

    return _build(base, (x, y, z), 0, lambda s: s == 0, step)


def offset_automaton(base: int, x: str, y: str, c: int) -> Automaton:
    """y = x + c for a fixed natural c."""
    if c < 0:
        raise InputError("offset must be a natural number")

    def step(s, d):
        if s == "dead":
            return s
        nxt = base * s + d[1] - d[0]
        return nxt if 0 <= nxt <= c else "dead"

    return _build(base, (x, y), 0, lambda s: s == c, step)


def mul_const_automaton(base: int, c: int, x: str, y: str) -> Automaton:
    """c * x = y for a fixed natural c."""
    if c < 0:
        raise InputError("multiplier must be a natural number")

    def step(s, d):
        if s == "dead":
            return s
        nxt = base * s + d[1] - c * d[0]
        return nxt if 0 <= nxt <= max(c, 0) else "dead"

    return _build(base, (x, y), 0, lambda s: s == 0, step)


def const_automaton(base: int, x: str, v: int) -> Automaton:
    """x = v for a fixed natural v, built along the digits of v."""
    if v < 0:
        raise InputError("constants must be natural numbers")
    digs = []
    t = v
    while t:
        digs.append(t % base)
        t //= base
    digs.reverse()  # msd first; empty for v == 0

    def step(s, d):
        if s == "dead":
            return s
        if s == 0 and d[0] == 0:
            return 0  # leading zeros
        if s < len(digs) and d[0] == digs[s]:
            return s + 1
        return "dead"

    return _build(base, (x,), 0, lambda s: s == len(digs), step)


def builtin_relation(name: str, base: int, tracks: Sequence[str], value: int | None = None) -> Automaton:
    """Canonical arithmetic relations: eq, lt, add (x+y=z), mul_const (c*x=y),
    const (x=v)."""
    tracks = tuple(tracks)
    if name == "eq":
        return eq_automaton(base, *tracks)
    if name == "lt":
        return lt_automaton(base, *tracks)
    if name == "add":
        return add_automaton(base, *tracks)
    if name == "mul_const":
        if value is None:
            raise InputError("mul_const needs a constant")
        return mul_const_automaton(base, value, *tracks)
    if name == "const":
        if value is None:
            raise InputError("const needs a value")
        return const_automaton(base, tracks[0], value)
    raise InputError(f"unsupported builtin relation {name!r}")


# -- DFAOs -------------------------------------------------------------------


def _output_key(v):
    if isinstance(v, frozenset):
        return (1, tuple(sorted(v)))
    return (0, v if isinstance(v, (int, float, str)) else str(v))


class Dfao:
    """Single-track automaton with an output value attached to each state."""

    __slots__ = ("base", "n_states", "initial", "delta", "outputs")

    def __init__(self, base, initial, delta, outputs):
        self.base = int(base)
        self.delta = np.asarray(delta, dtype=np.int32)
        self.n_states = self.delta.shape[0]
        self.initial = int(initial)
        self.outputs = tuple(outputs)
        if self.delta.shape != (self.n_states, self.base):
            raise InputError("DFAO transition table has wrong shape")
        if len(self.outputs) != self.n_states:
            raise InputError("one output per state required")

    def __repr__(self) -> str:
        return f"Dfao(base={self.base}, states={self.n_states})"

    def output_at(self, n: int) -> object:
        if n < 0:
            raise InputError("indices are natural numbers")
        digs = []
        while n:
            digs.append(n % self.base)
            n //= self.base
        q = self.initial
        for d in reversed(digs):
            q = int(self.delta[q, d])
        return self.outputs[q]

    def outputs_upto(self, n_max: int) -> list:
        return [self.output_at(n) for n in range(n_max + 1)]

    def minimized(self) -> "Dfao":
        distinct = sorted(set(self.outputs), key=_output_key)
        out_id = {v: i for i, v in enumerate(distinct)}
        labels = np.array([out_id[v] for v in self.outputs], dtype=np.int64)
        delta, init, labels2 = _minimize_tables(self.delta, self.initial, labels)
        return Dfao(self.base, init, delta, [distinct[int(i)] for i in labels2])

    def map_outputs(self, fn) -> "Dfao":
        return Dfao(self.base, self.initial, self.delta, [fn(v) for v in self.outputs])

    def as_acceptor(self, values, track: str) -> Automaton:
        """Automaton over ``track`` accepting the n whose output lies in ``values``."""
        values = set(values)
        acc = np.array([v in values for v in self.outputs])
        return Automaton(self.base, (track,), self.initial, self.delta, acc).minimized()

    def to_json_dict(self) -> dict:
        return {
            "kind": "dfao",
            "base": self.base,
            "msd": True,
            "initial": self.initial,
            "outputs": [v if isinstance(v, (int, str)) else sorted(v) for v in self.outputs],
            "transitions": [[int(x) for x in row] for row in self.delta],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Dfao":
        if data.get("kind") != "dfao":
            raise InputError("not a DFAO dump")
        return cls(data["base"], data["initial"], np.array(data["transitions"]), data["outputs"])

    def to_walnut(self) -> str:
        lines = [f"msd_{self.base}", ""]
        for q in range(self.n_states):
            lines.append(f"{q} {self.outputs[q]}")
            for d in range(self.base):
                lines.append(f"{d} -> {int(self.delta[q, d])}")
            lines.append("")
        return "\n".join(lines).rstrip() + "\n"

    def to_dot(self) -> str:
        lines = ["digraph dfao {", "  rankdir=LR;", '  __start [shape=none, label=""];']
        for q in range(self.n_states):
            lines.append(f'  q{q} [shape=circle, label="{q}/{self.outputs[q]}"];')
        lines.append(f"  __start -> q{self.initial};")
        for q in range(self.n_states):
            by_target: dict[int, list[str]] = {}
            for d in range(self.base):
                by_target.setdefault(int(self.delta[q, d]), []).append(str(d))
            for tgt, labels in sorted(by_target.items()):
                lines.append(f'  q{q} -> q{tgt} [label="{",".join(labels)}"];')
        lines.append("}")
        return "\n".join(lines)


def dfao_product(dfaos: Sequence[Dfao], combine_outputs) -> Dfao:
    """Synchronous product of single-track DFAOs; the output of a product
    state is ``combine_outputs(component outputs)``."""
    if not dfaos:
        raise InputError("need at least one DFAO")
    base = dfaos[0].base
    if any(d.base != base for d in dfaos):
        raise InputError("base mismatch in DFAO product")
    start = tuple(d.initial for d in dfaos)
    index = {start: 0}
    order = [start]
    rows = []
    qi = 0
    while qi < len(order):
        state = order[qi]
        qi += 1
        row = []
        for sym in range(base):
            nxt = tuple(int(d.delta[q, sym]) for d, q in zip(dfaos, state))
            t = index.get(nxt)
            if t is None:
                if len(index) >= STATE_LIMIT:
                    raise ResourceLimitError("dfao_product", f"more than {STATE_LIMIT} states")
                t = len(order)
                index[nxt] = t
                order.append(nxt)
            row.append(t)
        rows.append(row)
    outputs = [combine_outputs([d.outputs[q] for d, q in zip(dfaos, state)]) for state in order]
    return Dfao(base, 0, np.array(rows, dtype=np.int32), outputs)


def minimize_dfao(d: Dfao) -> Dfao:
    return d.minimized()
