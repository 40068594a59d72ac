"""First-order formulas over (N, +, <) with sequence indexing, and their
compilation to multi-track automata.

Terms are built from variables, constants, sums and constant multiples; there
is no subtraction (express t-u=v as t=u+v with an auxiliary variable).
Formulas may index named DFAO-defined sequences (``X[t]=@v``) and apply named
precompiled relations (``$name(t1,...,tn)``).  Universal quantifiers compile
as the dual of existential ones; every connective minimizes eagerly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from . import automata as au
from .automata import Automaton, Dfao
from .errors import InputError, ParseError

# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise InputError("constants must be natural numbers")


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    factor: int
    term: object

    def __post_init__(self):
        if self.factor < 0:
            raise InputError("multipliers must be natural numbers")


Term = Var | Const | Add | Mul


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt:
    left: Term
    right: Term


@dataclass(frozen=True)
class SeqIs:
    """Sequence value test: <sequence>[term] = value."""

    sequence: str
    index: Term
    value: object


@dataclass(frozen=True)
class SeqSame:
    """Equality of two sequence values: <x>[t] = <y>[u]."""

    left_sequence: str
    left_index: Term
    right_sequence: str
    right_index: Term


@dataclass(frozen=True)
class Rel:
    """Application of a named relation to terms."""

    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    variables: tuple[str, ...]
    body: object


@dataclass(frozen=True)
class Forall:
    variables: tuple[str, ...]
    body: object


def conj(*formulas):
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


def disj(*formulas):
    out = formulas[0]
    for f in formulas[1:]:
        out = Or(out, f)
    return out


def leq(left: Term, right: Term):
    return Not(Lt(right, left))


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Add):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, Mul):
        return term_vars(t.term)
    raise InputError(f"not a term: {t!r}")


def free_vars(phi) -> set[str]:
    if isinstance(phi, (Eq, Lt)):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, SeqIs):
        return term_vars(phi.index)
    if isinstance(phi, SeqSame):
        return term_vars(phi.left_index) | term_vars(phi.right_index)
    if isinstance(phi, Rel):
        out: set[str] = set()
        for t in phi.args:
            out |= term_vars(t)
        return out
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Exists, Forall)):
        return free_vars(phi.body) - set(phi.variables)
    raise InputError(f"not a formula: {phi!r}")


def _all_names(phi) -> set[str]:
    if isinstance(phi, (Exists, Forall)):
        return _all_names(phi.body) | set(phi.variables)
    if isinstance(phi, Not):
        return _all_names(phi.body)
    if isinstance(phi, (And, Or, Implies, Iff)):
        return _all_names(phi.left) | _all_names(phi.right)
    return free_vars(phi)


# -- environment --------------------------------------------------------------


class Environment:
    """Immutable binding of sequence and relation names, all in one base."""

    __slots__ = ("base", "sequences", "relations")

    def __init__(self, base: int, sequences=None, relations=None):
        self.base = int(base)
        self.sequences: dict[str, Dfao] = dict(sequences or {})
        self.relations: dict[str, Automaton] = dict(relations or {})

    def _check_name(self, name: str):
        if name in self.sequences or name in self.relations:
            raise InputError(f"name {name!r} is already bound")

    def with_sequence(self, name: str, dfao: Dfao) -> "Environment":
        self._check_name(name)
        if dfao.base != self.base:
            raise InputError(f"sequence {name!r} has base {dfao.base}, expected {self.base}")
        dfao = dfao.minimized()
        if int(dfao.delta[dfao.initial, 0]) != dfao.initial:
            raise InputError(f"sequence {name!r} is not stable under leading zeros")
        return Environment(self.base, {**self.sequences, name: dfao}, self.relations)

    def with_relation(self, name: str, automaton: Automaton) -> "Environment":
        """Bind a relation; the automaton's track order is the parameter order."""
        self._check_name(name)
        if automaton.base != self.base:
            raise InputError(f"relation {name!r} has base {automaton.base}, expected {self.base}")
        return Environment(self.base, self.sequences, {**self.relations, name: automaton})

    def sequence(self, name: str) -> Dfao:
        if name not in self.sequences:
            raise InputError(f"unbound sequence {name!r}")
        return self.sequences[name]

    def relation(self, name: str) -> Automaton:
        if name not in self.relations:
            raise InputError(f"unbound relation {name!r}")
        return self.relations[name]


# -- compilation ---------------------------------------------------------------


class _Gensym:
    def __init__(self, used: set[str]):
        self.used = set(used)
        self.counter = 0

    def __call__(self) -> str:
        while True:
            name = f"_a{self.counter}"
            self.counter += 1
            if name not in self.used:
                self.used.add(name)
                return name


def _flatten_term(t: Term, base: int, gensym: _Gensym, constraints: list, auxes: list) -> str:
    """Reduce a term to a single track name plus side constraints."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        u = gensym()
        constraints.append(au.const_automaton(base, u, t.value))
        auxes.append(u)
        return u
    if isinstance(t, Add):
        for a, b in ((t.left, t.right), (t.right, t.left)):
            if isinstance(a, Const):
                tb = _flatten_term(b, base, gensym, constraints, auxes)
                u = gensym()
                constraints.append(au.offset_automaton(base, tb, u, a.value))
                auxes.append(u)
                return u
        ta = _flatten_term(t.left, base, gensym, constraints, auxes)
        tb = _flatten_term(t.right, base, gensym, constraints, auxes)
        u = gensym()
        constraints.append(au.add_automaton(base, ta, tb, u))
        auxes.append(u)
        return u
    if isinstance(t, Mul):
        tt = _flatten_term(t.term, base, gensym, constraints, auxes)
        u = gensym()
        constraints.append(au.mul_const_automaton(base, t.factor, tt, u))
        auxes.append(u)
        return u
    raise InputError(f"not a term: {t!r}")


def _finish_atom(core: Automaton, constraints: list, auxes: list) -> Automaton:
    out = core
    for c in constraints:
        out = au.combine("and", out, c)
    live = [u for u in auxes if u in out.tracks]
    if live:
        out = au.project_exists(out, live)
    return out.minimized()


def _seq_acceptor(env: Environment, name: str, value) -> tuple[Dfao, object]:
    dfao = env.sequence(name)
    sample = dfao.outputs[0]
    if isinstance(sample, int) and not isinstance(value, int):
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise InputError(f"value {value!r} does not match outputs of sequence {name!r}")
    if isinstance(sample, str) and not isinstance(value, str):
        value = str(value)
    return dfao, value


def _compile(phi, env: Environment, gensym: _Gensym) -> Automaton:
    base = env.base
    if isinstance(phi, (Eq, Lt)):
        constraints: list = []
        auxes: list = []
        tl = _flatten_term(phi.left, base, gensym, constraints, auxes)
        tr = _flatten_term(phi.right, base, gensym, constraints, auxes)
        if tl == tr:
            core = (
                au.true_automaton(base, (tl,))
                if isinstance(phi, Eq)
                else au.false_automaton(base, (tl,))
            )
        elif isinstance(phi, Eq):
            core = au.eq_automaton(base, tl, tr)
        else:
            core = au.lt_automaton(base, tl, tr)
        return _finish_atom(core, constraints, auxes)
    if isinstance(phi, SeqIs):
        constraints = []
        auxes = []
        tr = _flatten_term(phi.index, base, gensym, constraints, auxes)
        dfao, value = _seq_acceptor(env, phi.sequence, phi.value)
        core = dfao.as_acceptor({value}, tr)
        return _finish_atom(core, constraints, auxes)
    if isinstance(phi, SeqSame):
        values = set(env.sequence(phi.left_sequence).outputs) & set(
            env.sequence(phi.right_sequence).outputs
        )
        if not values:
            # disjoint output alphabets can never agree
            name = sorted(free_vars(phi))[0] if free_vars(phi) else gensym()
            return au.false_automaton(base, (name,))
        parts = [
            And(SeqIs(phi.left_sequence, phi.left_index, v), SeqIs(phi.right_sequence, phi.right_index, v))
            for v in sorted(values, key=au._output_key)
        ]
        return _compile(disj(*parts), env, gensym)
    if isinstance(phi, Rel):
        rel = env.relation(phi.name)
        if len(phi.args) != len(rel.tracks):
            raise InputError(
                f"relation {phi.name!r} takes {len(rel.tracks)} arguments, got {len(phi.args)}"
            )
        constraints = []
        auxes = []
        arg_tracks = [_flatten_term(t, base, gensym, constraints, auxes) for t in phi.args]
        # rename relation parameters onto argument tracks; duplicated argument
        # tracks go through a fresh copy glued with an equality
        mapping: dict[str, str] = {}
        taken: set[str] = set()
        for param, target in zip(rel.tracks, arg_tracks):
            if target in taken:
                fresh = gensym()
                constraints.append(au.eq_automaton(base, target, fresh))
                auxes.append(fresh)
                target = fresh
            mapping[param] = target
            taken.add(target)
        core = rel.rename_tracks(mapping)
        return _finish_atom(core, constraints, auxes)
    if isinstance(phi, Not):
        return au.combine("not", _compile(phi.body, env, gensym))
    if isinstance(phi, (And, Or, Implies, Iff)):
        op = {And: "and", Or: "or", Implies: "implies", Iff: "iff"}[type(phi)]
        return au.combine(op, _compile(phi.left, env, gensym), _compile(phi.right, env, gensym))
    if isinstance(phi, Exists):
        body = _compile(phi.body, env, gensym)
        doomed = [v for v in phi.variables if v in body.tracks]
        return au.project_exists(body, doomed) if doomed else body
    if isinstance(phi, Forall):
        return _compile(Not(Exists(phi.variables, Not(phi.body))), env, gensym)
    raise InputError(f"not a formula: {phi!r}")


def compile_formula(phi, env: Environment, free_order: Sequence[str] | None = None) -> Automaton:
    """Compile to an automaton whose tracks are exactly ``free_order``."""
    fv = free_vars(phi)
    if free_order is None:
        free_order = tuple(sorted(fv))
    free_order = tuple(free_order)
    if len(set(free_order)) != len(free_order):
        raise InputError("free_order has duplicates")
    missing = fv - set(free_order)
    if missing:
        raise InputError(f"free variables {sorted(missing)} not in free_order")
    gensym = _Gensym(_all_names(phi) | set(free_order))
    out = _compile(phi, env, gensym)
    return out.with_tracks(free_order).minimized()


def decide(phi, env: Environment) -> bool:
    """Truth value of a sentence."""
    if free_vars(phi):
        raise InputError(f"not a sentence; free variables {sorted(free_vars(phi))}")
    out = compile_formula(phi, env, ())
    return bool(out.accepting[out.initial])


def witness(phi, env: Environment, bound: int) -> dict[str, int] | None:
    """Least satisfying assignment with all components <= bound, or None."""
    fv = tuple(sorted(free_vars(phi)))
    if not fv:
        raise InputError("witness needs free variables; use decide for sentences")
    out = compile_formula(phi, env, fv)
    found = au.enumerate_accepted(out, bound)
    if not found:
        return None
    best = min(found)
    return dict(zip(fv, best))


# -- parser --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<msd>\?msd_\d+)|(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_']*)"
    r"|(?P<op><=>|=>|<=|>=|!=|[()\[\],=<>+*$@&|~]))"
)


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        pos = m.end()
        if m.lastgroup == "msd":
            tokens.append(("msd", int(m.group("msd")[5:]), m.start("msd")))
        elif m.lastgroup == "int":
            tokens.append(("int", int(m.group("int")), m.start("int")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
    return tokens


class _Parser:
    """Recursive-descent parser for the Walnut-like predicate syntax.

    Quantifiers ``E``/``A`` (optionally fused with the first variable, as in
    ``Ep,i``) extend as far right as possible; ``~`` binds tightest, then
    ``&``, ``|``, ``=>``, ``<=>``.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.base_hint: int | None = None
        if self.tokens and self.tokens[0][0] == "msd":
            self.base_hint = self.tokens[0][1]
            self.pos = 1

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def _next(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def _expect(self, kind, value=None):
        tok = self._next()
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or kind}, found {tok[1]!r}", tok[2])
        return tok

    def parse(self):
        phi = self.formula()
        tok = self._peek()
        if tok[0] is not None:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return phi

    def formula(self):
        return self.iff()

    def iff(self):
        left = self.implies()
        while self._peek()[:2] == ("op", "<=>"):
            self._next()
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.disjunction()
        if self._peek()[:2] == ("op", "=>"):
            self._next()
            return Implies(left, self.implies())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self._peek()[:2] == ("op", "|"):
            self._next()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self._peek()[:2] == ("op", "&"):
            self._next()
            left = And(left, self.unary())
        return left

    def _quantifier_split(self):
        """A name token starting with E/A begins a quantifier (unless it is a
        sequence name, i.e. followed by '['); the remainder of the token, if
        any, is the first bound variable."""
        kind, value, pos = self._peek()
        if kind != "name" or value[0] not in "EA":
            return None
        if self._lookahead_is_index():
            return None
        return value[0], value[1:], pos

    def unary(self):
        kind, value, pos = self._peek()
        if kind == "op" and value == "~":
            self._next()
            return Not(self.unary())
        if kind == "op" and value == "(":
            # parenthesized formula, or a parenthesized term inside an atom
            save = self.pos
            try:
                self._next()
                phi = self.formula()
                self._expect("op", ")")
                return phi
            except ParseError:
                self.pos = save
                return self.atom()
        quant = self._quantifier_split()
        if quant is not None:
            q, first, _ = quant
            self._next()
            names = [first] if first else []
            if not names:
                names.append(self._expect("name")[1])
            while self._peek()[:2] == ("op", ","):
                self._next()
                names.append(self._expect("name")[1])
            body = self.formula()
            cls = Exists if q == "E" else Forall
            return cls(tuple(names), body)
        return self.atom()

    def atom(self):
        kind, value, pos = self._peek()
        if kind == "op" and value == "$":
            self._next()
            name = self._expect("name")[1]
            self._expect("op", "(")
            args = [self.term()]
            while self._peek()[:2] == ("op", ","):
                self._next()
                args.append(self.term())
            self._expect("op", ")")
            return Rel(name, tuple(args))
        if kind == "name" and self._lookahead_is_index():
            return self.sequence_atom()
        left = self.term()
        op_tok = self._next()
        if op_tok[0] != "op" or op_tok[1] not in ("=", "!=", "<", ">", "<=", ">="):
            raise ParseError(f"expected comparison, found {op_tok[1]!r}", op_tok[2])
        right = self.term()
        return self._comparison(op_tok[1], left, right)

    def _lookahead_is_index(self) -> bool:
        return (
            self.pos + 1 < len(self.tokens)
            and self.tokens[self.pos + 1][:2] == ("op", "[")
        )

    def sequence_atom(self):
        name = self._expect("name")[1]
        self._expect("op", "[")
        index = self.term()
        self._expect("op", "]")
        op_tok = self._next()
        if op_tok[0] != "op" or op_tok[1] not in ("=", "!="):
            raise ParseError("sequence values support only = and !=", op_tok[2])
        negate = op_tok[1] == "!="
        kind, value, pos = self._peek()
        if kind == "op" and value == "@":
            self._next()
            vk, vv, vp = self._next()
            if vk not in ("int", "name"):
                raise ParseError("expected a value after '@'", vp)
            atom = SeqIs(name, index, vv)
        elif kind == "name" and self._lookahead_is_index():
            name2 = self._expect("name")[1]
            self._expect("op", "[")
            index2 = self.term()
            self._expect("op", "]")
            atom = SeqSame(name, index, name2, index2)
        else:
            raise ParseError("sequence comparison needs @value or another sequence index", pos)
        return Not(atom) if negate else atom

    @staticmethod
    def _comparison(op: str, left: Term, right: Term):
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return Not(Eq(left, right))
        if op == "<":
            return Lt(left, right)
        if op == ">":
            return Lt(right, left)
        if op == "<=":
            return Not(Lt(right, left))
        return Not(Lt(left, right))  # >=

    def term(self):
        left = self.addend()
        while self._peek()[:2] == ("op", "+"):
            self._next()
            left = Add(left, self.addend())
        return left

    def addend(self):
        kind, value, pos = self._peek()
        if kind == "int":
            self._next()
            if self._peek()[:2] == ("op", "*"):
                self._next()
                return Mul(value, self.primary())
            return Const(value)
        prim = self.primary()
        if self._peek()[:2] == ("op", "*"):
            op_pos = self._peek()[2]
            self._next()
            kind2, value2, pos2 = self._next()
            if kind2 != "int":
                raise ParseError("multiplication must involve an integer constant", pos2)
            return Mul(value2, prim)
        return prim

    def primary(self):
        kind, value, pos = self._next()
        if kind == "name":
            if value[0] in "EA" and len(value) > 1:
                raise ParseError(
                    f"{value!r} reads as a quantifier; variable names must not start with E or A",
                    pos,
                )
            return Var(value)
        if kind == "int":
            return Const(value)
        if kind == "op" and value == "(":
            t = self.term()
            self._expect("op", ")")
            return t
        raise ParseError(f"expected a term, found {value!r}", pos)


def parse_formula(text: str, base: int | None = None):
    """Parse the plain-text predicate syntax; validates an optional ?msd_k
    prefix against ``base``."""
    parser = _Parser(text)
    if base is not None and parser.base_hint is not None and parser.base_hint != base:
        raise ParseError(f"formula declares msd_{parser.base_hint} but base is {base}", 0)
    return parser.parse()
