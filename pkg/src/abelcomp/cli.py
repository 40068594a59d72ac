"""Command-line front end.

Thin client over the same report layer the HTTP service wraps.  Exit codes:
0 success, 2 input/classification error, 3 inconclusive certification,
4 oracle mismatch, 5 resource limit.
"""
from __future__ import annotations

import pathlib
import sys

import click

from . import abelian as ab
from . import reports
from .automata import Automaton, Dfao
from .errors import (
    AbelcompError,
    InconclusiveError,
    InputError,
    OracleMismatchError,
    ResourceLimitError,
)

EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3
EXIT_ORACLE = 4
EXIT_RESOURCE = 5


def _exit_code(exc: AbelcompError) -> int:
    if isinstance(exc, ResourceLimitError):
        return EXIT_RESOURCE
    if isinstance(exc, OracleMismatchError):
        return EXIT_ORACLE
    if isinstance(exc, InconclusiveError):
        return EXIT_INCONCLUSIVE
    if isinstance(exc, InputError):
        return EXIT_INPUT
    return EXIT_INPUT


def _load_morphism(spec: str):
    if spec.startswith("@"):
        spec = pathlib.Path(spec[1:]).read_text()
    return reports.parse_morphism(spec)


def _emit(report: dict, json_path: str | None, text: str) -> None:
    if json_path:
        pathlib.Path(json_path).write_text(reports.dumps(report))
    click.echo(text)


def _write_automaton(obj: Automaton | Dfao, fmt: str, path: pathlib.Path) -> None:
    if fmt == "json":
        path.with_suffix(".json").write_text(reports.dumps(obj.to_json_dict()))
    elif fmt == "dot":
        path.with_suffix(".dot").write_text(obj.to_dot() + "\n")
    elif fmt == "walnut":
        path.with_suffix(".txt").write_text(obj.to_walnut())
    else:
        raise InputError(f"unknown format {fmt!r}")


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            fn(*args, **kwargs)
        except AbelcompError as exc:
            stage = getattr(exc, "stage", None)
            prefix = f"error ({type(exc).__name__}"
            if stage:
                prefix += f", stage {stage}"
            click.echo(f"{prefix}): {exc}", err=True)
            sys.exit(_exit_code(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Abelian complexity automata for fixed points of Parikh-collinear
    morphisms."""


_morphism_arg = click.argument("morphism")
_seed_arg = click.argument("seed")
_json_opt = click.option("--json", "json_path", default=None, help="write the full report to this file")


@main.command()
@_morphism_arg
@_seed_arg
@_json_opt
@_guarded
def analyze(morphism, seed, json_path):
    """Classify a morphism: collinearity, eigenvalue, partition, core, bounds."""
    f = _load_morphism(morphism)
    rep = reports.analyze_report(f, seed)
    lines = [
        f"morphism: {rep['morphism']}",
        f"Parikh-collinear: yes; eigenvalue k = {rep['eigenvalue']}",
        f"immortal letters B = {{{', '.join(rep['immortal'])}}}; "
        f"mortal letters C = {{{', '.join(rep['mortal'])}}}",
        f"non-erasing core g: {rep['g']} (primitive: {rep['g_primitive']})",
        f"prolongable on {seed!r}: {rep['prolongable']}",
        f"linear recurrence (core): <= {rep['bounds']['linear_recurrence_core']}",
        f"linear recurrence (fixed point): <= {rep['bounds']['linear_recurrence_fixed_point']}",
        f"recognizability bound: {rep['bounds']['recognizability_expression']} "
        f"({rep['bounds']['recognizability_digits']} digits)",
    ]
    if rep["dropped_letters"]:
        lines.append(f"letters unreachable from {seed!r} dropped: {rep['dropped_letters']}")
    _emit(rep, json_path, "\n".join(lines))


@main.command()
@_morphism_arg
@_seed_arg
@click.option("--depth", default=10_000, show_default=True, help="oracle cross-check depth")
@click.option("--cmax", default=64, show_default=True, help="recognizability constant budget")
@click.option("--deep", is_flag=True, help="raise the check depth to 1e5")
@click.option("--check/--no-check", default=True, show_default=True, help="diff outputs against the brute-force oracle")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "dot", "walnut"]), show_default=True)
@click.option("--out", default=None, help="directory to write the exported DFAO files")
@_json_opt
@_guarded
def abelian(morphism, seed, depth, cmax, deep, check, fmt, out, json_path):
    """Compute the abelian complexity DFAO of the fixed point."""
    f = _load_morphism(morphism)
    cfg = ab.PipelineConfig(depth=depth, deep=deep, c_max=cmax, check=check)
    report = ab.run_pipeline(f, seed, cfg)
    rep = report.to_json_dict()
    if out is not None:
        outdir = pathlib.Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_automaton(report.word_dfao, fmt, outdir / "word_dfao")
        if report.abelian_dfao is not None:
            _write_automaton(report.abelian_dfao, fmt, outdir / "abelian_dfao")
    lines = [
        f"eigenvalue k = {rep['eigenvalue']}; presentation "
        f"{rep['presentation_size']} -> {rep['presentation_size_minimized']} letters",
    ]
    if report.degenerate:
        lines.append("fixed point is ultimately periodic; used the direct path")
    else:
        lines.append(
            f"recognizability constant C = {rep['recognizability_constant']}; "
            f"cut automaton: {rep['cut_automaton_states']} states"
        )
        lines.append(f"difference sets: {rep['difference_sets']}")
        lines.append(f"attained vectors: {len(rep['vectors'])}")
    lines.append(f"abelian complexity: {report.description.spaced()}")
    _emit(rep, json_path, "\n".join(lines))


@main.command()
@_morphism_arg
@_seed_arg
@click.option("--enumerate", "enumerate_to", default=100, show_default=True, help="list cuts up to this bound")
@click.option("--format", "fmt", default="json", type=click.Choice(["json", "dot", "walnut"]), show_default=True)
@click.option("--out", default=None, help="directory to write the cut automaton")
@_json_opt
@_guarded
def cutset(morphism, seed, enumerate_to, fmt, out, json_path):
    """Enumerate the cutting set and build its automaton."""
    f = _load_morphism(morphism)
    rep = reports.cutset_report(f, seed, enumerate_to)
    if out is not None:
        outdir = pathlib.Path(out)
        outdir.mkdir(parents=True, exist_ok=True)
        _write_automaton(Automaton.from_json_dict(rep["automaton"]), fmt, outdir / "cut")
    if not rep["agreement"]:
        click.echo("cut automaton disagrees with enumeration", err=True)
        sys.exit(EXIT_ORACLE)
    _emit(rep, json_path, " ".join(str(v) for v in rep["positions"]))


@main.command()
@_morphism_arg
@_seed_arg
@_json_opt
@_guarded
def uniformize(morphism, seed, json_path):
    """Print the minimized k-uniform presentation of the fixed point."""
    f = _load_morphism(morphism)
    rep = reports.uniformize_report(f, seed)
    text = (
        f"base {rep['base']}; {rep['letters']} letters, "
        f"{rep['letters_minimized']} after minimization\n" + rep["presentation"].rstrip()
    )
    _emit(rep, json_path, text)


@main.command()
@click.argument("formula_file")
@click.option("--morphism", "morphism", required=True, help="morphism rules or @file")
@click.option("--seed", "seed", required=True, help="seed letter")
@_json_opt
@_guarded
def decide(formula_file, morphism, seed, json_path):
    """Decide a sentence about the fixed point (bound as X in the formula)."""
    f = _load_morphism(morphism)
    text = pathlib.Path(formula_file).read_text()
    rep = reports.decide_report(text, f, seed)
    _emit(rep, json_path, "True" if rep["result"] else "False")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
