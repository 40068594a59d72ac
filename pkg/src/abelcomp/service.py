"""HTTP service exposing the pipeline.

Stateless: each request parses its morphism, runs the requested stage(s), and
returns the same canonical report the CLI produces.  Library errors map to
422 with a structured body carrying the error class and pipeline stage.
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import abelian as ab
from . import reports
from .errors import AbelcompError

app = FastAPI(
    title="abelcomp",
    description=(
        "Decision pipeline for abelian complexities of fixed points of "
        "Parikh-collinear morphisms"
    ),
    version="0.1.0",
)


class MorphismRequest(BaseModel):
    morphism: str = Field(description="whitespace-separated rules, e.g. '0->012 1->112002 2->'")
    seed: str = Field(description="letter the morphism is prolongable on")


class AnalyzeResponse(BaseModel):
    morphism: str
    seed: str
    parikh_collinear: bool
    prolongable: bool
    eigenvalue: int
    immortal: list[str]
    mortal: list[str]
    g: str
    g_primitive: bool
    dropped_letters: list[str]
    bounds: dict


class AbelianRequest(MorphismRequest):
    depth: int = Field(default=10_000, ge=0, description="oracle cross-check depth")
    cmax: int = Field(default=64, ge=1, description="recognizability constant budget")
    deep: bool = False
    check: bool = True


class AbelianResponse(BaseModel):
    eigenvalue: int
    degenerate: bool
    description: dict
    recognizability_constant: int | None
    difference_sets: dict[str, list[int]] | None
    vectors: list[list[int]] | None
    report: dict = Field(description="full canonical pipeline report")


class CutsetRequest(MorphismRequest):
    enumerate_to: int = Field(default=100, ge=0)


class CutsetResponse(BaseModel):
    positions: list[int]
    recognizability_constant: int
    agreement: bool
    report: dict


class UniformizeResponse(BaseModel):
    base: int
    letters: int
    letters_minimized: int
    presentation: str
    report: dict


class DecideRequest(MorphismRequest):
    formula: str = Field(description="sentence in the predicate syntax; the word is bound as X")


class DecideResponse(BaseModel):
    result: bool
    base: int
    formula: str


@app.exception_handler(AbelcompError)
async def _abelcomp_error(_: Request, exc: AbelcompError):
    return JSONResponse(
        status_code=422,
        content={
            "error": type(exc).__name__,
            "message": str(exc),
            "stage": getattr(exc, "stage", None),
        },
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: MorphismRequest):
    f = reports.parse_morphism(req.morphism)
    return reports.analyze_report(f, req.seed)


@app.post("/abelian", response_model=AbelianResponse)
def abelian(req: AbelianRequest):
    f = reports.parse_morphism(req.morphism)
    cfg = ab.PipelineConfig(depth=req.depth, deep=req.deep, c_max=req.cmax, check=req.check)
    rep = reports.abelian_report(f, req.seed, cfg)
    return AbelianResponse(
        eigenvalue=rep["eigenvalue"],
        degenerate=rep["degenerate"],
        description=rep["description"],
        recognizability_constant=rep["recognizability_constant"],
        difference_sets=rep["difference_sets"],
        vectors=rep["vectors"],
        report=rep,
    )


@app.post("/cutset", response_model=CutsetResponse)
def cutset(req: CutsetRequest):
    f = reports.parse_morphism(req.morphism)
    rep = reports.cutset_report(f, req.seed, req.enumerate_to)
    return CutsetResponse(
        positions=rep["positions"],
        recognizability_constant=rep["recognizability_constant"],
        agreement=rep["agreement"],
        report=rep,
    )


@app.post("/uniformize", response_model=UniformizeResponse)
def uniformize(req: MorphismRequest):
    f = reports.parse_morphism(req.morphism)
    rep = reports.uniformize_report(f, req.seed)
    return UniformizeResponse(
        base=rep["base"],
        letters=rep["letters"],
        letters_minimized=rep["letters_minimized"],
        presentation=rep["presentation"],
        report=rep,
    )


@app.post("/decide", response_model=DecideResponse)
def decide(req: DecideRequest):
    f = reports.parse_morphism(req.morphism)
    rep = reports.decide_report(req.formula, f, req.seed)
    return DecideResponse(result=rep["result"], base=rep["base"], formula=rep["formula"])
