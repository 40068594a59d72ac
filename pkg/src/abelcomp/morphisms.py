"""Ordered alphabets, finite words, and morphisms.

Letters are interned to small integers; a Word stores letter ids over a fixed
Alphabet.  Morphism application on long words goes through ``str.translate``
on chr-encoded ids, which is what keeps million-letter prefixes cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ClassificationError,
    DomainMismatchError,
    InputError,
    NotProlongableError,
    ParseError,
    ShapeError,
)


class Alphabet:
    """A totally ordered finite set of letters with printable names."""

    __slots__ = ("letters", "_index")

    def __init__(self, letters: Iterable[str]):
        letters = tuple(str(x) for x in letters)
        if not letters:
            raise InputError("alphabet must be non-empty")
        if len(set(letters)) != len(letters):
            raise InputError(f"duplicate letters in alphabet {letters}")
        self.letters = letters
        self._index = {name: i for i, name in enumerate(letters)}

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.letters)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise DomainMismatchError(
                f"letter {name!r} not in alphabet {list(self.letters)}"
            ) from None

    def word(self, text: str | Sequence[str]) -> "Word":
        """Build a word from a string (one char per letter) or a sequence of names."""
        if isinstance(text, str) and all(len(x) == 1 for x in self.letters):
            return Word(self, tuple(self.index(ch) for ch in text))
        return Word(self, tuple(self.index(x) for x in text))


class Word:
    """A finite word over an Alphabet, stored as a tuple of letter ids."""

    __slots__ = ("alphabet", "ids")

    def __init__(self, alphabet: Alphabet, ids: tuple[int, ...]):
        self.alphabet = alphabet
        self.ids = ids

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(self.alphabet.letters[i] for i in self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.alphabet, self.ids[i])
        return self.alphabet.letters[self.ids[i]]

    def __add__(self, other: "Word") -> "Word":
        if self.alphabet != other.alphabet:
            raise DomainMismatchError("cannot concatenate words over different alphabets")
        return Word(self.alphabet, self.ids + other.ids)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.ids == other.ids
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.ids))

    def __str__(self) -> str:
        names = self.alphabet.letters
        if all(len(x) == 1 for x in names):
            return "".join(names[i] for i in self.ids)
        return " ".join(names[i] for i in self.ids)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def parikh(self) -> tuple[int, ...]:
        counts = [0] * len(self.alphabet)
        for i in self.ids:
            counts[i] += 1
        return tuple(counts)

    def count(self, letter: str) -> int:
        return self.ids.count(self.alphabet.index(letter))

    def is_prefix_of(self, other: "Word") -> bool:
        return self.alphabet == other.alphabet and other.ids[: len(self.ids)] == self.ids


def parikh(w: Word) -> tuple[int, ...]:
    """Per-letter occurrence counts of ``w``, in alphabet order."""
    return w.parikh()


@dataclass(frozen=True)
class LetterPartition:
    """Split of the alphabet into immortal letters B and mortal letters C."""

    immortal: tuple[str, ...]
    mortal: tuple[str, ...]


class Morphism:
    """A morphism between free monoids, given by one image word per letter."""

    __slots__ = ("domain", "codomain", "images", "_table")

    def __init__(self, domain: Alphabet, codomain: Alphabet, images: Sequence[Word]):
        images = tuple(images)
        if len(images) != len(domain):
            raise InputError("one image per domain letter required")
        for w in images:
            if w.alphabet != codomain:
                raise DomainMismatchError("image word not over the codomain alphabet")
        self.domain = domain
        self.codomain = codomain
        self.images = images
        # chr-encoded translation table for fast application to long words
        self._table = {i: "".join(chr(j) for j in w.ids) for i, w in enumerate(images)}

    @classmethod
    def from_rules(cls, rules: dict[str, str], order: Sequence[str] | None = None) -> "Morphism":
        """Endomorphism from ``{letter: image}``; alphabet order defaults to rule order."""
        letters = tuple(order) if order is not None else tuple(rules)
        alpha = Alphabet(letters)
        return cls(alpha, alpha, [alpha.word(rules[x]) for x in letters])

    @classmethod
    def parse(cls, text: str) -> "Morphism":
        """Parse the ``a->image`` whitespace-separated rule format.

        Letters are single visible characters; an empty right-hand side
        (``2->``) denotes an erasing image.
        """
        rules: dict[str, str] = {}
        pos = 0
        for token in text.split():
            pos = text.index(token, pos)
            if "->" not in token:
                raise ParseError(f"rule {token!r} is missing '->'", pos)
            lhs, rhs = token.split("->", 1)
            if len(lhs) != 1 or not lhs.isprintable() or lhs.isspace():
                raise ParseError(f"left-hand side {lhs!r} must be a single visible letter", pos)
            if lhs in rules:
                raise ParseError(f"duplicate rule for letter {lhs!r}", pos)
            rules[lhs] = rhs
            pos += len(token)
        if not rules:
            raise ParseError("no rules found", 0)
        letters = tuple(rules)
        for lhs, rhs in rules.items():
            for ch in rhs:
                if ch not in rules:
                    raise ParseError(
                        f"image of {lhs!r} uses letter {ch!r} which has no rule", text.index(lhs + "->")
                    )
        return cls.from_rules(rules, letters)

    def rules_text(self) -> str:
        return " ".join(f"{b}->{self.image(b)}" for b in self.domain)

    def __repr__(self) -> str:
        return f"Morphism({self.rules_text()!r})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Morphism)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, self.images))

    def image(self, letter: str) -> Word:
        return self.images[self.domain.index(letter)]

    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def _require_endo(self):
        if not self.is_endomorphism():
            raise ShapeError("operation requires an endomorphism")

    # -- application ----------------------------------------------------

    def _apply_encoded(self, encoded: str) -> str:
        return encoded.translate(self._table)

    def apply(self, w: Word) -> Word:
        if w.alphabet != self.domain:
            raise DomainMismatchError("word is not over the morphism's domain")
        encoded = "".join(chr(i) for i in w.ids)
        return Word(self.codomain, tuple(ord(c) for c in self._apply_encoded(encoded)))

    def __call__(self, w) -> Word:
        if isinstance(w, str):
            w = self.domain.word(w)
        return self.apply(w)

    def compose(self, inner: "Morphism") -> "Morphism":
        """The morphism ``self o inner``."""
        if inner.codomain != self.domain:
            raise DomainMismatchError("composition domains do not match")
        return Morphism(inner.domain, self.codomain, [self.apply(w) for w in inner.images])

    # -- Parikh algebra --------------------------------------------------

    def adjacency_matrix(self) -> np.ndarray:
        """Matrix M with M[b, c] = number of occurrences of b in the image of c."""
        self._require_endo()
        n = len(self.domain)
        m = np.zeros((n, n), dtype=np.int64)
        for c, w in enumerate(self.images):
            for b in w.ids:
                m[b, c] += 1
        return m

    def is_parikh_collinear(self) -> bool:
        """True iff all images' Parikh vectors are pairwise linearly dependent."""
        self._require_endo()
        vecs = [w.parikh() for w in self.images]
        ref = next((v for v in vecs if any(v)), None)
        if ref is None:
            return True
        for v in vecs:
            if not any(v):
                continue
            for i in range(len(ref)):
                for j in range(i + 1, len(ref)):
                    if ref[i] * v[j] - ref[j] * v[i] != 0:
                        return False
        return True

    def collinearity_witness(self):
        """None if Parikh-collinear, else (letter_b, letter_c, i, j, minor) for
        the first non-zero 2x2 minor of two image Parikh vectors."""
        self._require_endo()
        vecs = [w.parikh() for w in self.images]
        names = self.domain.letters
        ref_idx = next((i for i, v in enumerate(vecs) if any(v)), None)
        if ref_idx is None:
            return None
        ref = vecs[ref_idx]
        for c, v in enumerate(vecs):
            if not any(v):
                continue
            for i in range(len(ref)):
                for j in range(i + 1, len(ref)):
                    minor = ref[i] * v[j] - ref[j] * v[i]
                    if minor != 0:
                        return (names[ref_idx], names[c], names[i], names[j], minor)
        return None

    def eigenvalue(self) -> int:
        """Sum over letters b of |image(b)|_b (the growth base of a collinear morphism)."""
        witness = self.collinearity_witness()
        if witness is not None:
            raise ClassificationError(
                "eigenvalue is only defined for Parikh-collinear morphisms "
                f"(minor witness {witness})"
            )
        return sum(w.ids.count(i) for i, w in enumerate(self.images))

    # -- letter classification -------------------------------------------

    def _mortal_ids(self) -> set[int]:
        """Letters some iterate sends to the empty word (fixpoint computation)."""
        self._require_endo()
        mortal = {i for i, w in enumerate(self.images) if len(w) == 0}
        changed = True
        while changed:
            changed = False
            for i, w in enumerate(self.images):
                if i not in mortal and all(j in mortal for j in w.ids):
                    mortal.add(i)
                    changed = True
        return mortal

    def mortal_partition(self) -> LetterPartition:
        if not self.is_parikh_collinear():
            raise ClassificationError("mortal partition requires a Parikh-collinear morphism")
        erased = {i for i, w in enumerate(self.images) if len(w) == 0}
        if self._mortal_ids() != erased:
            raise ClassificationError(
                "mortal/immortal dichotomy fails: some letter has a nonempty image "
                "that dies under iteration"
            )
        names = self.domain.letters
        return LetterPartition(
            immortal=tuple(x for i, x in enumerate(names) if i not in erased),
            mortal=tuple(x for i, x in enumerate(names) if i in erased),
        )

    def kappa_projection(self) -> tuple["Morphism", "Morphism"]:
        """The mortal-letter eraser kappa and the non-erasing core g = kappa o f."""
        part = self.mortal_partition()
        if not part.immortal:
            raise ClassificationError("all letters are mortal; no infinite fixed point exists")
        sub = Alphabet(part.immortal)
        kappa = Morphism(
            self.domain,
            sub,
            [sub.word(x if x in part.immortal else "") for x in self.domain],
        )
        g = Morphism(sub, sub, [kappa.apply(self.image(b)) for b in part.immortal])
        if any(len(w) == 0 for w in g.images):
            raise ClassificationError("erasure removal produced an erasing morphism")
        return kappa, g

    def is_primitive(self, cutoff: int | None = None) -> bool:
        """True iff some power of the adjacency matrix is everywhere positive.

        The default cutoff (#A-1)^2 + 1 is the Wielandt bound, past which a
        primitive matrix must already be positive.
        """
        self._require_endo()
        n = len(self.domain)
        if cutoff is None:
            cutoff = (n - 1) ** 2 + 1
        m = self.adjacency_matrix() > 0
        power = m.copy()
        for _ in range(cutoff):
            if power.all():
                return True
            power = (power @ m) > 0
        return bool(power.all())

    def is_prolongable(self, a: str) -> bool:
        """True iff image(a) = a.u with u containing an immortal letter.

        The immortality requirement makes the fixed point infinite even for
        erasing morphisms.
        """
        self._require_endo()
        ia = self.domain.index(a)
        w = self.images[ia]
        if len(w) < 2 or w.ids[0] != ia:
            return False
        mortal = self._mortal_ids()
        return any(j not in mortal for j in w.ids[1:])

    # -- fixed points ----------------------------------------------------

    def _fixed_point_encoded(self, a: str, n: int) -> str:
        if not self.is_prolongable(a):
            raise NotProlongableError(f"morphism is not prolongable on {a!r}")
        w = chr(self.domain.index(a))
        while len(w) < n:
            w = self._apply_encoded(w)
        return w[:n]

    def fixed_point_prefix(self, a: str, n: int) -> Word:
        """The length-``n`` prefix of the fixed point obtained by iterating from ``a``."""
        enc = self._fixed_point_encoded(a, n)
        return Word(self.domain, tuple(ord(c) for c in enc))

    def restrict_to_reachable(self, a: str) -> "Morphism":
        """Restrict to the letters occurring in some iterate of ``a``."""
        self._require_endo()
        if not self.is_prolongable(a):
            raise NotProlongableError(f"morphism is not prolongable on {a!r}")
        reach = {self.domain.index(a)}
        frontier = list(reach)
        while frontier:
            nxt = []
            for i in frontier:
                for j in self.images[i].ids:
                    if j not in reach:
                        reach.add(j)
                        nxt.append(j)
            frontier = nxt
        if len(reach) == len(self.domain):
            return self
        letters = tuple(x for i, x in enumerate(self.domain.letters) if i in reach)
        sub = Alphabet(letters)
        return Morphism(sub, sub, [sub.word(str(self.image(x))) for x in letters])


def image_length_ratio(f: Morphism, letter: str, reference: str) -> Fraction:
    """|f(reference)|_letter / |f(reference)| in lowest terms."""
    w = f.image(reference)
    if len(w) == 0:
        raise ClassificationError(f"reference letter {reference!r} has an empty image")
    return Fraction(w.count(letter), len(w))
