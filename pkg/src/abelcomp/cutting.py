"""Cutting sets: enumeration, the base-k cut automaton built from a
recognizability certificate, and the next/previous-cut relations.

A cut is a position where a block f(b) starts in the factorization
x = f(y_0) f(y_1) ... of the fixed point along its non-erasing core g.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import automata as au
from . import logic as lg
from .automata import Automaton, Dfao
from .errors import ClassificationError, InputError
from .morphisms import Morphism
from .uniform import UniformPresentation


@dataclass(frozen=True)
class CutEnumeration:
    """Sorted cut positions <= limit and the block letter owning each gap."""

    limit: int
    positions: tuple[int, ...]
    letters: tuple[str, ...]  # letters[i] owns the block starting at positions[i]

    def gaps(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.positions, self.positions[1:]))


def enumerate_cuts(f: Morphism, a: str, limit: int) -> CutEnumeration:
    """Direct factorization of the prefix of the fixed point."""
    f = f.restrict_to_reachable(a)
    if not f.is_parikh_collinear():
        raise ClassificationError("cut enumeration requires a Parikh-collinear morphism")
    _, g = f.kappa_projection()
    n = 64
    while True:
        y = g._fixed_point_encoded(a, n)
        positions = [0]
        letters = []
        for c in y:
            letter = g.domain.letters[ord(c)]
            if positions[-1] > limit:
                break
            letters.append(letter)
            positions.append(positions[-1] + len(f.image(letter)))
        if positions[-1] > limit:
            pos = [p for p in positions if p <= limit]
            return CutEnumeration(limit, tuple(pos), tuple(letters[: len(pos)]))
        n *= 4


def _window_env(p: UniformPresentation) -> lg.Environment:
    return lg.Environment(p.k).with_sequence("X", p.dfao())


def _window_automaton(
    env: lg.Environment,
    window: tuple[str, ...],
    center_offset: int,
    atom_cache: dict,
) -> Automaton:
    """Automaton over track n accepting the n at which the given window occurs
    with its center at n (window spans [n-center_offset, ...))."""
    base = env.base
    parts = []
    for d, letter in enumerate(window):
        key = (d, letter)
        if key not in atom_cache:
            phi = lg.SeqIs("X", lg.Add(lg.Var("m"), lg.Const(d)), letter)
            atom_cache[key] = lg.compile_formula(phi, env, ("m",))
        parts.append(atom_cache[key])
    # balanced fold keeps intermediates small
    while len(parts) > 1:
        parts = [
            au.combine("and", parts[i], parts[i + 1]) if i + 1 < len(parts) else parts[i]
            for i in range(0, len(parts), 2)
        ]
    conj = parts[0]
    shifted = au.combine("and", conj, au.offset_automaton(base, "m", "n", center_offset))
    return au.project_exists(shifted, "m")


def cut_class_automata(p: UniformPresentation, cert) -> dict[str, Automaton]:
    """One automaton per immortal image class, accepting the cut positions
    whose block belongs to that class.  Positions below the certificate
    constant come from the enumerated patch stored in the certificate."""
    env = _window_env(p)
    atom_cache: dict = {}
    by_class: dict[str, list[Automaton]] = {}
    for window, (is_cut, letter, offset) in sorted(cert.table.items()):
        if not is_cut:
            continue
        by_class.setdefault(letter, []).append(
            _window_automaton(env, window, cert.constant, atom_cache)
        )
    for pos, letter in zip(cert.small_cuts, cert.small_classes):
        by_class.setdefault(letter, []).append(au.const_automaton(p.k, "n", pos))
    out = {}
    for letter, autos in sorted(by_class.items()):
        acc = autos[0]
        for other in autos[1:]:
            acc = au.combine("or", acc, other)
        out[letter] = acc.minimized()
    return out


def cut_automaton(p: UniformPresentation, cert, classes: dict[str, Automaton] | None = None) -> Automaton:
    """Single-track automaton for membership in the cutting set."""
    if classes is None:
        classes = cut_class_automata(p, cert)
    autos = [classes[c] for c in sorted(classes)]
    acc = autos[0]
    for other in autos[1:]:
        acc = au.combine("or", acc, other)
    return acc.minimized()


def ne_pr_relations(cut: Automaton, base: int | None = None):
    """(NE, PR_strict, PR_weak) as synchronized two-track relations.

    NE(i) is the least cut >= i; PR_strict(i) the greatest cut < i with
    PR_strict(0) = 0; PR_weak(n) the greatest cut <= n.
    """
    base = base or cut.base
    if not cut.accepts(0):
        raise InputError("cut automaton must accept 0")
    if au.is_finite(cut):
        raise InputError("cut set is finite; input is not an infinite fixed point")
    env = lg.Environment(base).with_relation("cut", cut.rename_tracks({cut.tracks[0]: "c"}))
    ne = lg.compile_formula(
        lg.parse_formula("$cut(m) & m>=i & (Aj ($cut(j) & j>=i) => j>=m)"), env, ("i", "m")
    )
    pr_strict = lg.compile_formula(
        lg.parse_formula("(i=0 & m=0) | (i>=1 & $cut(m) & m<i & (Aj ($cut(j) & j<i) => j<=m))"),
        env,
        ("i", "m"),
    )
    pr_weak = lg.compile_formula(
        lg.parse_formula("$cut(m) & m<=n & (Aj ($cut(j) & j<=n) => j<=m)"), env, ("n", "m")
    )
    return ne, pr_strict, pr_weak
