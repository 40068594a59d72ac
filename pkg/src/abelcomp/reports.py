"""Report builders shared by the CLI and the HTTP service.

Everything returns plain JSON-serializable dicts with canonical (sorted,
deterministic) content, so identical inputs give byte-identical dumps.
"""
from __future__ import annotations

import json

from . import abelian as ab
from . import automata as au
from . import cutting as ct
from . import logic as lg
from . import recog as rc
from .errors import ClassificationError
from .morphisms import Morphism
from .uniform import minimize_presentation, uniformize


def parse_morphism(text: str) -> Morphism:
    return Morphism.parse(text)


def analyze_report(f: Morphism, a: str) -> dict:
    """Classification summary: collinearity, eigenvalue, partition, core,
    primitivity, prolongability, and the theoretical bounds."""
    if not f.is_endomorphism():
        raise ClassificationError("analysis requires an endomorphism")
    witness = f.collinearity_witness()
    if witness is not None:
        b, c, i, j, minor = witness
        raise ClassificationError(
            f"not Parikh-collinear: the ({i},{j}) minor of the Parikh vectors of "
            f"the images of {b!r} and {c!r} is {minor}, not 0"
        )
    prolongable = f.is_prolongable(a)
    restricted = f.restrict_to_reachable(a) if prolongable else f
    part = restricted.mortal_partition()
    _, g = restricted.kappa_projection()
    bounds = rc.bound_recognizability(restricted)
    return {
        "morphism": restricted.rules_text(),
        "seed": a,
        "dropped_letters": [x for x in f.domain.letters if x not in restricted.domain.letters],
        "parikh_collinear": True,
        "prolongable": prolongable,
        "eigenvalue": restricted.eigenvalue(),
        "immortal": list(part.immortal),
        "mortal": list(part.mortal),
        "g": g.rules_text(),
        "g_primitive": g.is_primitive(),
        "bounds": {
            "linear_recurrence_core": str(bounds.k_sigma_bound),
            "linear_recurrence_fixed_point": str(bounds.k_f_bound),
            "recognizability_digits": bounds.rec_bound_digits,
            "recognizability_exact": None if bounds.rec_bound is None else str(bounds.rec_bound),
            "recognizability_expression": bounds.rec_expression,
        },
    }


def abelian_report(f: Morphism, a: str, config: ab.PipelineConfig | None = None) -> dict:
    return ab.run_pipeline(f, a, config).to_json_dict()


def cutset_report(f: Morphism, a: str, enumerate_to: int = 100) -> dict:
    """Enumerated cuts plus the certificate-built cut automaton."""
    enum = ct.enumerate_cuts(f, a, enumerate_to)
    p = minimize_presentation(uniformize(f, a))
    cert = rc.certify_recognizability(f, a, p)
    cut = ct.cut_automaton(p, cert)
    got = [v[0] for v in au.enumerate_accepted(cut, enumerate_to)]
    return {
        "morphism": f.restrict_to_reachable(a).rules_text(),
        "seed": a,
        "enumerate_to": enumerate_to,
        "positions": list(enum.positions),
        "automaton_positions": got,
        "agreement": list(enum.positions) == got,
        "recognizability_constant": cert.constant,
        "certificate": cert.to_json_dict(),
        "automaton": cut.to_json_dict(),
    }


def uniformize_report(f: Morphism, a: str) -> dict:
    raw = uniformize(f, a)
    small = minimize_presentation(raw)
    return {
        "morphism": f.restrict_to_reachable(a).rules_text(),
        "seed": a,
        "base": small.k,
        "letters": raw.size,
        "letters_minimized": small.size,
        "presentation": small.export_text(),
        "dfao": small.dfao().to_json_dict(),
    }


def decide_report(formula_text: str, f: Morphism, a: str) -> dict:
    """Truth value of a sentence about the fixed point (bound as X)."""
    p = minimize_presentation(uniformize(f, a))
    env = lg.Environment(p.k).with_sequence("X", p.dfao())
    phi = lg.parse_formula(formula_text, base=p.k)
    value = lg.decide(phi, env)
    return {
        "formula": formula_text.strip(),
        "morphism": f.restrict_to_reachable(a).rules_text(),
        "seed": a,
        "base": p.k,
        "result": value,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
