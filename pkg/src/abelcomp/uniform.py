"""Conversion of a prolongable Parikh-collinear morphism into an equivalent
k-uniform morphism plus coding, and the resulting base-k DFAO.

Internal letters are pairs (b, i) with b a reachable immortal letter and
i < |f(b)|; the pair addresses the i-th position inside the block f(b).  The
image of (b, i) lists the pairs addressing positions [k*i, k*i + k) of the
block factorization f(c_0)...f(c_m-1), where c_0...c_m-1 = g(b).  This is
well defined because |f(g(b))| = k*|f(b)| for immortal b.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .automata import Dfao
from .errors import ClassificationError, InputError
from .morphisms import Alphabet, Morphism, Word


@dataclass(frozen=True)
class UniformPresentation:
    k: int
    alphabet: Alphabet  # output alphabet of the coding
    labels: tuple[str, ...]  # display labels of internal letters
    images: tuple[tuple[int, ...], ...]  # k-uniform images, entries are letter ids
    coding: tuple[int, ...]  # output letter id per internal letter
    start: int

    @property
    def size(self) -> int:
        return len(self.labels)

    def coding_letters(self) -> tuple[str, ...]:
        return tuple(self.alphabet.letters[c] for c in self.coding)

    def generated_prefix(self, n: int) -> Word:
        """Length-n prefix of coding(uniform^omega(start))."""
        table = {i: "".join(chr(j) for j in img) for i, img in enumerate(self.images)}
        w = chr(self.start)
        while len(w) < n:
            w = w.translate(table)
        return Word(self.alphabet, tuple(self.coding[ord(c)] for c in w[:n]))

    def dfao(self) -> Dfao:
        """States are internal letters; digit d maps a letter to position d of
        its image; the output is the coding."""
        delta = np.array(self.images, dtype=np.int32)
        return Dfao(self.k, self.start, delta, self.coding_letters())

    def export_text(self, name: str = "h", coding_name: str = "tau") -> str:
        """Two-line morphism+coding rendering of the presentation."""
        if self.size > 62:
            raise InputError("text export supports at most 62 internal letters")
        digits = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        rules = " ".join(
            f"{digits[i]}->{''.join(digits[j] for j in img)}" for i, img in enumerate(self.images)
        )
        codes = " ".join(
            f"{digits[i]}->{self.alphabet.letters[c]}" for i, c in enumerate(self.coding)
        )
        return f'morphism {name} "{rules}"\nmorphism {coding_name} "{codes}"\n'


def uniformize(f: Morphism, a: str) -> UniformPresentation:
    """Uniform presentation generating the fixed point of ``f`` on ``a``."""
    f = f.restrict_to_reachable(a)
    if not f.is_parikh_collinear():
        raise ClassificationError("uniformization requires a Parikh-collinear morphism")
    k = f.eigenvalue()
    if k < 2:
        raise ClassificationError(
            f"eigenvalue {k} < 2: the fixed point is finite or degenerate; "
            "use the ultimately-periodic path"
        )
    _, g = f.kappa_projection()
    immortal = g.domain.letters

    # pair letters in canonical order (immortal letter, offset)
    pair_id: dict[tuple[str, int], int] = {}
    labels = []
    for b in immortal:
        for i in range(len(f.image(b))):
            pair_id[(b, i)] = len(labels)
            labels.append(f"{b}.{i}")

    # block factorizations f(c_0)...f(c_m-1) of f(g(b))
    images = []
    coding = []
    for b in immortal:
        blocks = [str(c) for c in g.image(b)]
        bounds = [0]
        for c in blocks:
            bounds.append(bounds[-1] + len(f.image(c)))
        if bounds[-1] != k * len(f.image(b)):
            raise ClassificationError("block identity |f(g(b))| = k|f(b)| failed")
        for i in range(len(f.image(b))):
            img = []
            for pos in range(k * i, k * i + k):
                j = bisect_right(bounds, pos) - 1
                img.append(pair_id[(blocks[j], pos - bounds[j])])
            images.append(tuple(img))
            coding.append(f.codomain.index(f.image(b)[i]))

    start = pair_id[(a, 0)]
    if images[start][0] != start:
        raise ClassificationError("presentation start letter is not prolongable")
    return UniformPresentation(
        k=k,
        alphabet=f.codomain,
        labels=tuple(labels),
        images=tuple(images),
        coding=tuple(coding),
        start=start,
    )


def minimize_presentation(p: UniformPresentation) -> UniformPresentation:
    """Merge internal letters indistinguishable under (coding, image) behavior
    (partition refinement seeded by the coding)."""
    m = p.size
    part = {}
    seen: dict[int, int] = {}
    for i in range(m):
        part[i] = seen.setdefault(p.coding[i], len(seen))
    while True:
        sigs: dict[tuple, int] = {}
        new = {}
        for i in range(m):
            sig = (part[i],) + tuple(part[j] for j in p.images[i])
            new[i] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == len(set(part.values())):
            part = new
            break
        part = new

    # order classes by least member so runs are reproducible
    classes: dict[int, list[int]] = {}
    for i in range(m):
        classes.setdefault(part[i], []).append(i)
    ordered = sorted(classes.values(), key=min)
    new_id = {}
    for idx, members in enumerate(ordered):
        for i in members:
            new_id[i] = idx
    images = tuple(
        tuple(new_id[j] for j in p.images[members[0]]) for members in ordered
    )
    coding = tuple(p.coding[members[0]] for members in ordered)
    labels = tuple(p.labels[min(members)] for members in ordered)
    return UniformPresentation(
        k=p.k,
        alphabet=p.alphabet,
        labels=labels,
        images=images,
        coding=coding,
        start=new_id[p.start],
    )


def dfao_of_word(p: UniformPresentation) -> Dfao:
    return p.dfao()
