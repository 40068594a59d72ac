"""Recognizability: theoretical bounds as exact big integers, factor
enumeration through the uniform presentation, and the empirically certified
recognizability constant that gates the cut-automaton construction.

The theoretical bound is computed (exactly when it fits a digit budget) but
never drives the search; the pipeline uses the certificate, whose soundness
is cross-checked downstream against exact cut enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .cutting import CutEnumeration, enumerate_cuts
from .errors import ClassificationError, InconclusiveError, InputError, InsufficientDataError
from .morphisms import Morphism, Word
from .uniform import UniformPresentation

# -- bounds -------------------------------------------------------------------


@dataclass
class BoundReport:
    alphabet_size: int
    max_image: int
    min_immortal_image: int
    k_sigma_bound: int
    k_f_bound: int
    rec_bound: int | None
    rec_bound_digits: int
    rec_expression: str

    def summary(self) -> str:
        lines = [
            f"linear recurrence constant of the core: <= {self.k_sigma_bound}",
            f"linear recurrence constant of the fixed point: <= {self.k_f_bound}",
        ]
        if self.rec_bound is not None and self.rec_bound_digits <= 40:
            lines.append(f"recognizability constant: <= {self.rec_bound}")
        else:
            lines.append(
                f"recognizability constant: <= {self.rec_expression} "
                f"({self.rec_bound_digits} decimal digits)"
            )
        return "\n".join(lines)


def bound_linear_recurrence(sigma: Morphism) -> int:
    """|sigma|^(4*(#A)^2), valid for primitive prolongable sigma."""
    if not sigma.is_primitive():
        raise ClassificationError("linear recurrence bound requires a primitive morphism")
    if not any(
        len(w) >= 1 and w.ids[0] == i for i, w in enumerate(sigma.images)
    ):
        raise ClassificationError("no letter prolongs the morphism")
    size = max(len(w) for w in sigma.images)
    return size ** (4 * len(sigma.domain) ** 2)


def bound_K_f(f: Morphism, k_g: int) -> int:
    """ceil(k_g * |f| / min image length over immortal letters)."""
    part = f.mortal_partition()
    if not part.immortal:
        raise ClassificationError("no immortal letters")
    size = max(len(w) for w in f.images)
    min_b = min(len(f.image(b)) for b in part.immortal)
    return -(-k_g * size // min_b)


def bound_recognizability(f: Morphism, digit_budget: int = 200_000) -> BoundReport:
    """Exact value (or digit count) of the recognizability bound
    4*(|f|^(4 l^2) + 1) * l^2 * |f|^((2l+1)*(2 + |f|^((2^l+1)*l))) with l=#A."""
    if not f.is_parikh_collinear():
        raise ClassificationError("recognizability bound requires a Parikh-collinear morphism")
    part = f.mortal_partition()
    if not part.immortal:
        raise ClassificationError("no immortal letters")
    _, g = f.kappa_projection()
    ell = len(f.domain)
    size = max(len(w) for w in f.images)
    min_b = min(len(f.image(b)) for b in part.immortal)
    k_sigma = bound_linear_recurrence(g)
    k_f = -(-k_sigma * size // min_b)

    inner = size ** ((2**ell + 1) * ell)
    exponent = (2 * ell + 1) * (2 + inner)
    prefactor = 4 * (size ** (4 * ell * ell) + 1) * ell * ell
    expression = (
        f"4*({size}^{4 * ell * ell}+1) * {ell}^2 * {size}^({2 * ell + 1}*(2+{size}^{(2**ell + 1) * ell}))"
    )
    if size <= 1:
        rec = prefactor
        digits = len(str(rec))
    elif exponent * math.log10(size) <= digit_budget:
        rec = prefactor * size**exponent
        digits = len(str(rec))
    else:
        rec = None
        with mpmath.workdps(60 + len(str(exponent))):
            log10v = mpmath.log10(prefactor) + exponent * mpmath.log10(size)
            digits = int(mpmath.floor(log10v)) + 1
    return BoundReport(
        alphabet_size=ell,
        max_image=size,
        min_immortal_image=min_b,
        k_sigma_bound=k_sigma,
        k_f_bound=k_f,
        rec_bound=rec,
        rec_bound_digits=digits,
        rec_expression=expression,
    )


# -- empirical word statistics --------------------------------------------------


def power_free_check(f: Morphism, a: str, exponent: int, n: int) -> bool:
    """True iff no factor u^exponent (u non-empty) occurs in the length-n prefix."""
    if exponent < 1:
        raise InputError("exponent must be >= 1")
    if n == 0:
        return True
    if exponent == 1:
        return False
    enc = f._fixed_point_encoded(a, n)
    buf = np.frombuffer(enc.encode("utf-32-le"), dtype=np.uint32)
    for p in range(1, n // exponent + 1):
        eqs = (buf[:-p] == buf[p:]).astype(np.int8)
        d = np.diff(np.concatenate(([0], eqs, [0])))
        starts = np.flatnonzero(d == 1)
        if starts.size:
            ends = np.flatnonzero(d == -1)
            if int((ends - starts).max()) >= (exponent - 1) * p:
                return False
    return True


def return_words(f: Morphism, a: str, u, n: int) -> set[Word]:
    """Return words to ``u`` witnessed in the length-n prefix: the pieces
    between consecutive occurrence starts of ``u``."""
    if isinstance(u, str):
        u = f.domain.word(u)
    if len(u) == 0:
        raise InputError("return words are defined for non-empty factors")
    buf = f._fixed_point_encoded(a, n)
    pattern = "".join(chr(i) for i in u.ids)
    occurrences = []
    i = buf.find(pattern)
    while i >= 0:
        occurrences.append(i)
        i = buf.find(pattern, i + 1)
    if len(occurrences) < 2:
        raise InsufficientDataError(
            f"factor {str(u)!r} occurs {len(occurrences)} time(s) in the length-{n} prefix"
        )
    pieces = {buf[s:e] for s, e in zip(occurrences, occurrences[1:])}
    return {Word(f.domain, tuple(ord(c) for c in w)) for w in pieces}


# -- factor enumeration via the presentation ------------------------------------


def _internal_factor_strings(p: UniformPresentation, m: int) -> set[str]:
    """Exact length-m factors of the uniform fixed point, chr-encoded over
    internal letter ids."""
    table = {i: "".join(chr(j) for j in img) for i, img in enumerate(p.images)}

    def expand(letter: int, times: int) -> str:
        w = chr(letter)
        for _ in range(times):
            w = w.translate(table)
        return w

    # length-2 factor closure
    seed = table[p.start]
    pairs = {seed[i : i + 2] for i in range(len(seed) - 1)}
    while True:
        new = set(pairs)
        for pair in pairs:
            w = table[ord(pair[0])] + table[ord(pair[1])]
            new.update(w[i : i + 2] for i in range(len(w) - 1))
        if new == pairs:
            break
        pairs = new

    j = max(1, math.ceil(math.log(m, p.k))) + 1
    blocks = {i: expand(i, j) for i in range(p.size)}
    out = set()
    for pair in pairs:
        w = blocks[ord(pair[0])] + blocks[ord(pair[1])]
        out.update(w[i : i + m] for i in range(len(w) - m + 1))
    return out


def factor_strings_of_length(p: UniformPresentation, m: int) -> set[str]:
    """Exact length-m factors of the generated word, chr-encoded over output
    letter ids."""
    if m == 0:
        return {""}
    coded = set()
    for w in _internal_factor_strings(p, m):
        coded.add("".join(chr(p.coding[ord(c)]) for c in w))
    return coded


def factors_of_length(p: UniformPresentation, m: int) -> set[Word]:
    """The exact set of length-m factors of the generated word."""
    return {
        Word(p.alphabet, tuple(ord(c) for c in s)) for s in factor_strings_of_length(p, m)
    }


# -- the certificate -------------------------------------------------------------


@dataclass
class RecognizabilityCertificate:
    """Window table certifying a recognizability constant.

    Every occurrence (at center position >= constant, within the verified
    prefix) of each window of length 2*constant+1 classifies its center the
    same way: as sitting at ``offset`` inside a block belonging to the image
    class ``letter``; the center is a cut iff offset == 0.
    """

    constant: int
    depth: int
    table: dict[tuple[str, ...], tuple[bool, str, int]]
    small_cuts: tuple[int, ...]
    small_classes: tuple[str, ...]
    classes: dict[str, str] = field(default_factory=dict)  # immortal letter -> class rep

    @property
    def window_length(self) -> int:
        return 2 * self.constant + 1

    def to_json_dict(self) -> dict:
        return {
            "kind": "recognizability-certificate",
            "constant": self.constant,
            "depth": self.depth,
            "windows": [
                {"factor": list(w), "is_cut": c, "letter": letter, "offset": off}
                for w, (c, letter, off) in sorted(self.table.items())
            ],
            "small_cuts": list(self.small_cuts),
            "small_classes": list(self.small_classes),
            "classes": dict(sorted(self.classes.items())),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RecognizabilityCertificate":
        if data.get("kind") != "recognizability-certificate":
            raise InputError("not a recognizability certificate dump")
        table = {
            tuple(e["factor"]): (bool(e["is_cut"]), e["letter"], int(e["offset"]))
            for e in data["windows"]
        }
        return cls(
            constant=int(data["constant"]),
            depth=int(data["depth"]),
            table=table,
            small_cuts=tuple(data["small_cuts"]),
            small_classes=tuple(data["small_classes"]),
            classes=dict(data.get("classes", {})),
        )


class AmbiguityError(InconclusiveError):
    """No constant up to the budget certifies; carries the smallest
    conflicting window and both of its desubstitutions."""

    def __init__(self, c_max, window, first, second):
        self.window = window
        self.desubstitutions = (first, second)
        super().__init__(
            f"no recognizability constant <= {c_max}: window {''.join(window)!r} "
            f"desubstitutes both as (letter {first[1]}, offset {first[2]}) and "
            f"as (letter {second[1]}, offset {second[2]})"
        )


def _position_classification(f: Morphism, enum: CutEnumeration, length: int, class_of: dict[str, str]):
    """Arrays mapping each position < length to (image class id, offset in block)."""
    class_names = sorted(set(class_of.values()))
    class_idx = {name: i for i, name in enumerate(class_names)}
    cls = np.empty(length, dtype=np.int16)
    off = np.empty(length, dtype=np.int32)
    for start, letter in zip(enum.positions, enum.letters):
        end = min(start + len(f.image(letter)), length)
        if start >= length:
            break
        cls[start:end] = class_idx[class_of[letter]]
        off[start:end] = np.arange(0, end - start)
    return cls, off, class_names


def _build_table(buf: str, cls, off, class_names, c: int, limit: int):
    """Window table at constant c over centers in [c, limit); returns the
    table or the first conflict."""
    width = 2 * c + 1
    table: dict[str, tuple[int, int]] = {}
    for center in range(c, limit):
        w = buf[center - c : center + c + 1]
        entry = (int(cls[center]), int(off[center]))
        old = table.setdefault(w, entry)
        if old != entry:
            return None, (w, old, entry)
    return table, None


def certify_recognizability(
    f: Morphism,
    a: str,
    p: UniformPresentation,
    c_max: int = 64,
    depth: int | None = None,
) -> RecognizabilityCertificate:
    """Least constant C <= c_max whose window table is conflict-free over the
    verified prefix, complete (covers every factor of length 2C+1), and stable
    at C+1.  The verification prefix grows if it misses factors."""
    f = f.restrict_to_reachable(a)
    _, g = f.kappa_projection()
    rep_by_image: dict[tuple, str] = {}
    class_of = {}
    for b in g.domain.letters:
        class_of[b] = rep_by_image.setdefault(f.image(b).ids, b)

    if depth is None:
        depth = max(100_000, 50 * (2 * c_max + 1))

    length = depth
    last_conflict = None
    for _ in range(4):
        buflen = length + 2 * (c_max + 1) + 2
        buf = f._fixed_point_encoded(a, buflen)
        enum = enumerate_cuts(f, a, buflen)
        cls, off, class_names = _position_classification(f, enum, buflen, class_of)
        incomplete = False
        for c in range(1, c_max + 1):
            table, conflict = _build_table(buf, cls, off, class_names, c, length)
            if conflict is not None:
                w, e1, e2 = conflict
                last_conflict = (
                    tuple(f.domain.letters[ord(ch)] for ch in w),
                    (e1[1] == 0, class_names[e1[0]], e1[1]),
                    (e2[1] == 0, class_names[e2[0]], e2[1]),
                )
                continue
            exact = factor_strings_of_length(p, 2 * c + 1)
            if not set(table) >= exact:
                incomplete = True
                break  # prefix too short to witness every factor; grow it
            # stability: the table derived at C+1 must induce the same cut
            # decisions on the shared centers
            table_up, conflict_up = _build_table(buf, cls, off, class_names, c + 1, length)
            if conflict_up is not None:
                continue
            stable = all(
                (off_up == 0) == (table[w[1:-1]][1] == 0)
                for w, (cls_up, off_up) in table_up.items()
            )
            if not stable:
                continue
            named = {
                tuple(f.domain.letters[ord(ch)] for ch in w): (
                    o == 0,
                    class_names[ci],
                    o,
                )
                for w, (ci, o) in table.items()
            }
            small = [pos for pos in enum.positions if pos < c]
            small_classes = [
                class_of[enum.letters[enum.positions.index(pos)]] for pos in small
            ]
            return RecognizabilityCertificate(
                constant=c,
                depth=length,
                table=named,
                small_cuts=tuple(small),
                small_classes=tuple(small_classes),
                classes=dict(class_of),
            )
        if incomplete:
            length *= 2
            continue
        break
    if last_conflict is not None:
        raise AmbiguityError(c_max, *last_conflict)
    raise InconclusiveError(
        f"could not certify a recognizability constant <= {c_max} at depth {length}"
    )
