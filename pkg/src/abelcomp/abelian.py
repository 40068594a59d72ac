"""Abelian complexity of Parikh-collinear fixed points.

Builds, per letter, the synchronized prefix-count relation and the factor
count relation; derives the finite sets of attainable per-letter differences
and the attained zero-sum difference vectors; and synthesizes the minimized
DFAO whose output at n is the number of distinct Parikh vectors among the
length-n factors.  Ultimately periodic fixed points take a brute-force
detour that never touches the automaton machinery.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import automata as au
from . import cutting as ct
from . import logic as lg
from . import oracle as orc
from . import recog as rc
from .automata import Automaton, Dfao
from .errors import (
    AbelcompError,
    ClassificationError,
    InconclusiveError,
    NotProlongableError,
    OracleMismatchError,
)
from .morphisms import Morphism
from .uniform import UniformPresentation, minimize_presentation, uniformize


class InternalConsistencyError(InconclusiveError):
    """A relation that must be functional is not; the certificate is wrong."""


# -- descriptions and periodicity -------------------------------------------------


@dataclass(frozen=True)
class ComplexityDescription:
    """Eventually periodic description (minimal preperiod and period) or the
    aperiodicity flag."""

    aperiodic: bool
    preperiod: tuple = ()
    period: tuple = ()

    def compact(self) -> str:
        if self.aperiodic:
            return "aperiodic"
        pre = [str(v) for v in self.preperiod]
        per = [str(v) for v in self.period]
        if all(len(s) == 1 for s in pre + per):
            return f"{''.join(pre)}({''.join(per)})^w"
        return f"{' '.join(pre)} ({' '.join(per)})^w".strip()

    def spaced(self) -> str:
        if self.aperiodic:
            return "aperiodic"
        pre = " ".join(str(v) for v in self.preperiod)
        per = " ".join(str(v) for v in self.period)
        return f"{pre} ({per})^w".strip()

    def value_at(self, n: int):
        if self.aperiodic:
            raise AbelcompError("no closed form for an aperiodic description")
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]


def _seq_env(d: Dfao) -> lg.Environment:
    return lg.Environment(d.base).with_sequence("S", d)


_APERIODIC = "~(Ep,i p>0 & (An n>=i => S[n]=S[n+p]))"


def is_aperiodic(d: Dfao) -> bool:
    """Decides the sentence: no p>0 and i with S[n]=S[n+p] for all n>=i."""
    return lg.decide(lg.parse_formula(_APERIODIC), _seq_env(d.minimized()))


def is_ultimately_periodic(d: Dfao) -> bool:
    return not is_aperiodic(d)


def decide_ultimate_periodicity(d: Dfao) -> bool:
    """True iff the sequence is NOT ultimately periodic."""
    return is_aperiodic(d)


def describe_sequence(d: Dfao) -> ComplexityDescription:
    """Minimal preperiod/period read off the DFAO, or the aperiodic flag."""
    d = d.minimized()
    env = _seq_env(d)
    if lg.decide(lg.parse_formula(_APERIODIC), env):
        return ComplexityDescription(aperiodic=True)
    period_rel = lg.compile_formula(
        lg.parse_formula("p>0 & (Ei (An (n>=i => S[n]=S[n+p])))"), env, ("p",)
    )
    hit = au.least_accepted(period_rel, max_length=period_rel.n_states + 4)
    if hit is None:
        raise InconclusiveError("periodic sequence without a reachable period witness")
    p0 = hit[0]
    start_rel = lg.compile_formula(
        lg.parse_formula(f"An (n>=i => S[n]=S[n+{p0}])"), env, ("i",)
    )
    i0 = au.least_accepted(start_rel, max_length=start_rel.n_states + 4)[0]
    pre = tuple(d.output_at(n) for n in range(i0))
    per = tuple(d.output_at(n) for n in range(i0, i0 + p0))
    return ComplexityDescription(False, pre, per)


# -- synchronized relations --------------------------------------------------------


@dataclass(frozen=True)
class PrefixCountRelation:
    """Functional relation (n, y) with y the count of ``letter`` in the
    length-n prefix; the counts scale like ratio * n plus a bounded tail."""

    letter: str
    ratio: Fraction
    automaton: Automaton  # tracks (n, y)


def _and_all(autos: list[Automaton]) -> Automaton:
    parts = list(autos)
    while len(parts) > 1:
        parts = [
            au.combine("and", parts[i], parts[i + 1]) if i + 1 < len(parts) else parts[i]
            for i in range(0, len(parts), 2)
        ]
    return parts[0]


def _or_all(autos: list[Automaton]) -> Automaton:
    parts = list(autos)
    while len(parts) > 1:
        parts = [
            au.combine("or", parts[i], parts[i + 1]) if i + 1 < len(parts) else parts[i]
            for i in range(0, len(parts), 2)
        ]
    return parts[0]


def assert_functional(rel: Automaton, out_track: str, stage: str) -> None:
    """The relation must pair exactly one out_track value with every
    assignment of the remaining tracks."""
    k = rel.base
    twin = "_w"
    clash = _and_all(
        [rel, rel.rename_tracks({out_track: twin}), au.lt_automaton(k, out_track, twin)]
    )
    if not au.is_empty(clash):
        raise InternalConsistencyError(f"{stage}: relation is not single-valued")
    gaps = au.combine("not", au.project_exists(rel, out_track))
    if not au.is_empty(gaps):
        raise InternalConsistencyError(f"{stage}: relation is not total")


def build_prefix_relation(
    f: Morphism,
    letter: str,
    class_images: dict[str, "object"],
    class_autos: dict[str, Automaton],
    prev: Automaton,
) -> PrefixCountRelation:
    """Prefix-count relation for one letter.

    Split the length-n prefix at the last cut m: the block part contributes
    ratio*m occurrences, and the partial block x[m..n) is a proper prefix of
    one image, identified by its class; its contribution is a table lookup.
    """
    k = prev.base
    part = f.mortal_partition()
    ref = part.immortal[0]
    r = f.image(ref).count(letter)
    q = len(f.image(ref))
    ratio = Fraction(r, q)

    # tail cases over (m, n, z): z = count of letter in x[m..n)
    cases = [au.combine("and", au.eq_automaton(k, "m", "n"), au.const_automaton(k, "z", 0))]
    for rep in sorted(class_autos):
        image = class_images[rep]
        block = class_autos[rep].rename_tracks({class_autos[rep].tracks[0]: "m"})
        for t in range(1, len(image)):
            zv = image[:t].count(letter)
            cases.append(
                _and_all(
                    [
                        block,
                        au.offset_automaton(k, "m", "n", t),
                        au.const_automaton(k, "z", zv),
                    ]
                )
            )
    tail = _or_all(cases)

    # q*y = r*m + q*z, staged to keep the live track count small
    u3 = au.project_exists(
        _and_all(
            [
                au.mul_const_automaton(k, r, "m", "_t2"),
                au.mul_const_automaton(k, q, "z", "_t3"),
                au.add_automaton(k, "_t2", "_t3", "_t4"),
            ]
        ),
        ("_t2", "_t3"),
    )
    balance = au.project_exists(
        au.combine("and", u3, au.mul_const_automaton(k, q, "y", "_t4")), "_t4"
    )

    rel = au.project_exists(_and_all([prev, balance, tail]), ("m", "z"))
    assert_functional(rel, "y", f"prefix-count[{letter}]")
    return PrefixCountRelation(letter, ratio, rel)


def factor_count_relation(pref: PrefixCountRelation | Automaton) -> Automaton:
    """Relation (i, n, z) with z the count of the letter in x[i..i+n)."""
    rel = pref.automaton if isinstance(pref, PrefixCountRelation) else pref
    k = rel.base
    t1 = au.project_exists(
        au.combine("and", rel.rename_tracks({"n": "s"}), au.add_automaton(k, "z", "x", "y")),
        "y",
    )
    t2 = au.project_exists(au.combine("and", t1, au.add_automaton(k, "i", "n", "s")), "s")
    sync = au.project_exists(
        au.combine("and", t2, rel.rename_tracks({"n": "i", "y": "x"})), "x"
    )
    assert_functional(sync, "z", "factor-count")
    return sync


def attained_difference_set(pref: PrefixCountRelation, sync: Automaton) -> list[int]:
    """All attained values of count-in-factor minus count-in-prefix for the
    relation's letter; must be finite."""
    k = sync.base
    pos_core = au.project_exists(
        au.combine(
            "and",
            pref.automaton.rename_tracks({"y": "z"}),
            au.add_automaton(k, "d", "z", "x"),
        ),
        "z",
    )
    pos = au.project_exists(
        au.combine("and", sync.rename_tracks({"z": "x"}), pos_core), ("i", "n", "x")
    )
    neg_core = au.project_exists(
        au.combine(
            "and",
            pref.automaton.rename_tracks({"y": "z"}),
            au.add_automaton(k, "x", "d", "z"),
        ),
        "z",
    )
    neg = au.project_exists(
        au.combine("and", sync.rename_tracks({"z": "x"}), neg_core), ("i", "n", "x")
    )
    if not (au.is_finite(pos) and au.is_finite(neg)):
        raise ClassificationError(
            f"difference set for letter {pref.letter!r} is unbounded; the input "
            "cannot be a genuine Parikh-collinear fixed point"
        )
    values = {v[0] for v in au.enumerate_finite(pos)}
    values |= {-v[0] for v in au.enumerate_finite(neg)}
    if 0 not in values:
        raise InternalConsistencyError("difference set misses 0")
    return sorted(values)


@dataclass
class DifferenceProfile:
    """Attained per-letter difference ranges, the attained zero-sum vectors,
    and their per-length attainment automata."""

    letters: tuple[str, ...]
    sets: dict[str, tuple[int, ...]]
    vectors: tuple[tuple[int, ...], ...]
    attain: dict[tuple[int, ...], Automaton]
    dfao: Dfao = field(repr=False)  # outputs: frozenset of attained vectors

    def counts_dfao(self) -> Dfao:
        return self.dfao.map_outputs(len).minimized()

    def families_upto(self, n_max: int) -> list[frozenset]:
        return [self.dfao.output_at(n) for n in range(n_max + 1)]


def _vector_condition(pref: PrefixCountRelation, sync: Automaton, delta: int) -> Automaton:
    """(i, n) such that count(x[i..i+n)) - count(pref_n) equals delta."""
    k = sync.base
    if delta >= 0:
        shift = au.offset_automaton(k, "z", "x", delta)
    else:
        shift = au.offset_automaton(k, "x", "z", -delta)
    w = au.project_exists(
        au.combine("and", pref.automaton.rename_tracks({"y": "z"}), shift), "z"
    )
    return au.project_exists(au.combine("and", sync.rename_tracks({"z": "x"}), w), "x")


def attainable_vectors(
    prefs: dict[str, PrefixCountRelation],
    syncs: dict[str, Automaton],
    sets: dict[str, list[int]],
) -> DifferenceProfile:
    """Build attainment automata for every zero-sum candidate in the box of
    per-letter difference sets; keep those actually attained."""
    letters = tuple(prefs)
    cond: dict[tuple[str, int], Automaton] = {}
    for b in letters:
        for delta in sets[b]:
            cond[(b, delta)] = _vector_condition(prefs[b], syncs[b], delta)
    vectors = []
    attain = {}
    for combo in itertools.product(*[sets[b] for b in letters]):
        if sum(combo) != 0:
            continue
        joint = _and_all([cond[(b, delta)] for b, delta in zip(letters, combo)])
        acc = au.project_exists(joint, "i")
        if au.is_empty(acc):
            continue
        vectors.append(combo)
        attain[combo] = acc
    vectors.sort()
    zero = tuple(0 for _ in letters)
    if zero not in attain:
        raise InternalConsistencyError("zero difference vector not attained")
    parts = [
        Dfao(acc.base, acc.initial, acc.delta, [bool(x) for x in acc.accepting])
        for acc in (attain[v] for v in vectors)
    ]
    profile_dfao = au.dfao_product(
        parts,
        lambda outs: frozenset(v for v, hit in zip(vectors, outs) if hit),
    ).minimized()
    return DifferenceProfile(
        letters=letters,
        sets={b: tuple(sets[b]) for b in letters},
        vectors=tuple(vectors),
        attain=attain,
        dfao=profile_dfao,
    )


def abelian_dfao(profile: DifferenceProfile) -> Dfao:
    """Minimized DFAO computing the abelian complexity (the number of attained
    difference vectors per length)."""
    return profile.counts_dfao()


# -- pipeline -----------------------------------------------------------------------


@dataclass
class PipelineConfig:
    depth: int = 10_000  # oracle cross-check depth
    deep: bool = False  # raise the check depth to 1e5
    c_max: int = 64
    cert_depth: int | None = None
    check: bool = True  # run oracle cross-checks

    @property
    def effective_depth(self) -> int:
        return max(self.depth, 100_000) if self.deep else self.depth


@dataclass
class PipelineReport:
    morphism: str
    seed: str
    dropped_letters: tuple[str, ...]
    eigenvalue: int
    immortal: tuple[str, ...]
    mortal: tuple[str, ...]
    g_rules: str
    bound_report: rc.BoundReport
    presentation_size: int
    presentation_size_minimized: int
    word_dfao: Dfao
    word_aperiodic: bool
    degenerate: bool
    description: ComplexityDescription
    checked_depth: int
    constant: int | None = None
    certificate: rc.RecognizabilityCertificate | None = None
    cut_states: int | None = None
    ratios: dict[str, Fraction] | None = None
    difference_sets: dict[str, tuple[int, ...]] | None = None
    vectors: tuple[tuple[int, ...], ...] | None = None
    profile: DifferenceProfile | None = None
    abelian_dfao: Dfao | None = None
    oracle_values: list[int] | None = None

    def to_json_dict(self) -> dict:
        desc = {
            "aperiodic": self.description.aperiodic,
            "preperiod": list(self.description.preperiod),
            "period": list(self.description.period),
            "compact": self.description.compact(),
            "spaced": self.description.spaced(),
        }
        out = {
            "morphism": self.morphism,
            "seed": self.seed,
            "dropped_letters": list(self.dropped_letters),
            "eigenvalue": self.eigenvalue,
            "immortal": list(self.immortal),
            "mortal": list(self.mortal),
            "g": self.g_rules,
            "bounds": {
                "k_sigma": str(self.bound_report.k_sigma_bound),
                "k_f": str(self.bound_report.k_f_bound),
                "recognizability_digits": self.bound_report.rec_bound_digits,
                "recognizability_expression": self.bound_report.rec_expression,
            },
            "presentation_size": self.presentation_size,
            "presentation_size_minimized": self.presentation_size_minimized,
            "word_aperiodic": self.word_aperiodic,
            "degenerate": self.degenerate,
            "recognizability_constant": self.constant,
            "cut_automaton_states": self.cut_states,
            "ratios": None
            if self.ratios is None
            else {b: [f.numerator, f.denominator] for b, f in sorted(self.ratios.items())},
            "difference_sets": None
            if self.difference_sets is None
            else {b: list(v) for b, v in sorted(self.difference_sets.items())},
            "vectors": None if self.vectors is None else [list(v) for v in self.vectors],
            "description": desc,
            "abelian_dfao": None if self.abelian_dfao is None else self.abelian_dfao.to_json_dict(),
            "word_dfao": self.word_dfao.to_json_dict(),
            "checked_depth": self.checked_depth,
        }
        return out


def _stamp(stage: str, exc: AbelcompError) -> AbelcompError:
    exc.stage = getattr(exc, "stage", stage)
    if not str(exc).startswith(f"[{stage}]"):
        exc.args = (f"[{exc.stage}] {exc}",) + exc.args[1:]
    return exc


class PipelineContext:
    """Caches every stage artifact of one run."""

    def __init__(self, f: Morphism, a: str, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        self.original = f
        self.seed = a
        self.f: Morphism | None = None
        self.dropped: tuple[str, ...] = ()
        self.stage = "init"

    def _run_stage(self, name: str, fn):
        self.stage = name
        try:
            return fn()
        except AbelcompError as e:
            raise _stamp(name, e)

    # individual stages -----------------------------------------------------

    def validate(self):
        f, a = self.original, self.seed
        if not f.is_endomorphism():
            raise ClassificationError("pipeline needs an endomorphism")
        if not f.is_parikh_collinear():
            vecs = {b: f.image(b).parikh() for b in f.domain}
            raise ClassificationError(
                f"morphism is not Parikh-collinear (image Parikh vectors {vecs})"
            )
        if not f.is_prolongable(a):
            raise NotProlongableError(
                f"morphism is not prolongable on {a!r} (no infinite fixed point)"
            )
        restricted = f.restrict_to_reachable(a)
        self.dropped = tuple(x for x in f.domain.letters if x not in restricted.domain.letters)
        self.f = restricted
        self.partition = restricted.mortal_partition()
        self.kappa, self.g = restricted.kappa_projection()
        if not self.g.is_primitive():
            raise ClassificationError("non-erasing core is not primitive")
        self.k = restricted.eigenvalue()
        if self.k < 2:
            raise ClassificationError(f"eigenvalue {self.k} < 2 for a prolongable input")
        self.bounds = rc.bound_recognizability(restricted)

    def uniformize(self):
        self.presentation_raw = uniformize(self.f, self.seed)
        self.presentation = minimize_presentation(self.presentation_raw)
        self.word_dfao = self.presentation.dfao()
        if self.config.check:
            depth = min(self.config.effective_depth, 20_000)
            want = self.f.fixed_point_prefix(self.seed, depth + 1)
            diffs = [
                (n, self.word_dfao.output_at(n), want[n])
                for n in range(depth + 1)
                if self.word_dfao.output_at(n) != want[n]
            ]
            if diffs:
                raise OracleMismatchError("uniformize", diffs[:5])

    def decide_word_periodicity(self):
        self.word_description = describe_sequence(self.word_dfao)
        self.word_aperiodic = self.word_description.aperiodic

    def degenerate_description(self) -> ComplexityDescription:
        """Ultimately periodic fixed point: with the word's own (preperiod i,
        period p), its abelian complexity is (i, p)-eventually periodic, so
        brute-force values up to i + 2p pin down the minimal description."""
        i_x = len(self.word_description.preperiod)
        p_x = len(self.word_description.period)
        n_max = i_x + 2 * p_x + 2
        buf = orc.PrefixBuffer(self.f, self.seed)
        vals = [orc.brute_abelian(buf, n) for n in range(n_max + 1)]
        divisors = [d for d in range(1, p_x + 1) if p_x % d == 0]
        p0 = next(
            d
            for d in divisors
            if all(vals[n + d] == vals[n] for n in range(i_x, n_max - d + 1))
        )
        i0 = i_x
        while i0 > 0 and vals[i0 - 1] == vals[i0 - 1 + p0]:
            i0 -= 1
        return ComplexityDescription(False, tuple(vals[:i0]), tuple(vals[i0 : i0 + p0]))

    def certify(self):
        self.certificate = rc.certify_recognizability(
            self.f,
            self.seed,
            self.presentation,
            c_max=self.config.c_max,
            depth=self.config.cert_depth,
        )

    def build_cut_automata(self):
        self.class_autos = ct.cut_class_automata(self.presentation, self.certificate)
        self.cut = ct.cut_automaton(self.presentation, self.certificate, self.class_autos)
        enum = ct.enumerate_cuts(self.f, self.seed, self.config.effective_depth)
        got = [v[0] for v in au.enumerate_accepted(self.cut, self.config.effective_depth)]
        if list(enum.positions) != got:
            diffs = sorted(set(enum.positions).symmetric_difference(got))
            raise OracleMismatchError("cut-automaton", diffs[:10])
        self.ne, self.pr_strict, self.pr_weak = ct.ne_pr_relations(self.cut)
        for rel, out, name in (
            (self.ne, "m", "NE"),
            (self.pr_strict, "m", "PR_strict"),
            (self.pr_weak, "m", "PR_weak"),
        ):
            assert_functional(rel, out, name)

    def build_relations(self):
        class_images = {rep: self.f.image(rep) for rep in self.class_autos}
        prev = self.pr_weak  # tracks (m, n)
        self.prefix_relations = {}
        self.sync_relations = {}
        for b in self.f.domain.letters:
            pref = build_prefix_relation(self.f, b, class_images, self.class_autos, prev)
            self.prefix_relations[b] = pref
            self.sync_relations[b] = factor_count_relation(pref)
        if self.config.check:
            self._check_relation_values()

    def _check_relation_values(self):
        depth = min(self.config.effective_depth, 2_000)
        buf = orc.PrefixBuffer(self.f, self.seed, initial=depth + 8)
        for b, pref in self.prefix_relations.items():
            diffs = []
            for n in range(depth + 1):
                y = au.eval_function(pref.automaton, {"n": n}, "y")
                want = orc.brute_prefix_counts(buf, b, n)
                if y != want:
                    diffs.append((n, y, want))
                    if len(diffs) >= 5:
                        break
            if diffs:
                raise OracleMismatchError(f"prefix-count[{b}]", diffs)

    def build_profile(self):
        sets = {}
        for b in self.f.domain.letters:
            sets[b] = attained_difference_set(self.prefix_relations[b], self.sync_relations[b])
        self.difference_sets = sets
        self.profile = attainable_vectors(self.prefix_relations, self.sync_relations, sets)
        self.abelian = abelian_dfao(self.profile)

    def check_abelian_against_oracle(self):
        depth = self.config.effective_depth
        buf = orc.PrefixBuffer(self.f, self.seed)
        buf.ensure(2 * max(64 * depth, 10_000))
        diffs = []
        values = []
        for n in range(depth + 1):
            got = self.abelian.output_at(n)
            want = orc.brute_abelian(buf, n)
            values.append(want)
            if got != want:
                diffs.append((n, got, want))
                if len(diffs) >= 5:
                    break
        self.oracle_values = values
        if diffs:
            raise OracleMismatchError("abelian-dfao", diffs)

    # orchestration -----------------------------------------------------------

    def run(self) -> PipelineReport:
        cfg = self.config
        self._run_stage("classify", self.validate)
        self._run_stage("uniformize", self.uniformize)
        self._run_stage("periodicity", self.decide_word_periodicity)
        common = dict(
            morphism=self.f.rules_text(),
            seed=self.seed,
            dropped_letters=self.dropped,
            eigenvalue=self.k,
            immortal=self.partition.immortal,
            mortal=self.partition.mortal,
            g_rules=self.g.rules_text(),
            bound_report=self.bounds,
            presentation_size=self.presentation_raw.size,
            presentation_size_minimized=self.presentation.size,
            word_dfao=self.word_dfao,
            word_aperiodic=self.word_aperiodic,
        )
        if not self.word_aperiodic:
            desc = self._run_stage("degenerate", self.degenerate_description)
            return PipelineReport(
                degenerate=True,
                description=desc,
                checked_depth=len(self.word_description.preperiod)
                + 2 * len(self.word_description.period)
                + 2,
                **common,
            )
        self._run_stage("certify", self.certify)
        self._run_stage("cutset", self.build_cut_automata)
        self._run_stage("relations", self.build_relations)
        self._run_stage("differences", self.build_profile)
        self.oracle_values = None
        if cfg.check:
            self._run_stage("oracle", self.check_abelian_against_oracle)
        desc = self._run_stage("describe", lambda: describe_sequence(self.abelian))
        return PipelineReport(
            degenerate=False,
            description=desc,
            checked_depth=cfg.effective_depth if cfg.check else 0,
            oracle_values=self.oracle_values,
            constant=self.certificate.constant,
            certificate=self.certificate,
            cut_states=self.cut.n_states,
            ratios={b: p.ratio for b, p in self.prefix_relations.items()},
            difference_sets={b: tuple(v) for b, v in self.difference_sets.items()},
            vectors=self.profile.vectors,
            profile=self.profile,
            abelian_dfao=self.abelian,
            **common,
        )


def run_pipeline(f: Morphism, a: str, config: PipelineConfig | None = None) -> PipelineReport:
    """End-to-end: classify, uniformize, decide periodicity, certify, build
    the cut automaton and synchronized relations, synthesize and verify the
    abelian-complexity DFAO, and describe it."""
    return PipelineContext(f, a, config).run()
