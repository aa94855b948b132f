"""HTTP service exposing the numerical laboratory.

FastAPI application with one endpoint per experiment family.  All
computation lives in the core modules; this layer validates requests,
runs the experiment and shapes deterministic JSON responses (the
timestamp is isolated in a metadata field so payloads stay byte-stable
for identical configurations).
"""

from __future__ import annotations

import datetime
import json
from typing import List, Optional

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import asymptotics as asym
from . import distribution as dist_mod
from . import exprdsl
from . import genfunc as gf
from . import specialmap
from .errors import (AdmissibilityError, ColombeauLabError, DslSyntaxError,
                     EmptySetError, InsufficientSamplesError,
                     MomentConstructionError, OrderBudgetError,
                     QuadratureError)
from .funcspace import CompactSet, Domain, catalog
from .mollifier import MAX_Q, build_moment_mollifier, moment, to_json
from .seminorm import BoundedFamily

SCHEMA = "colombeau-lab/1"

app = FastAPI(title="colombeau-lab", version="1.0.0")


# ---------------------------------------------------------------------------
# Request models.

class MollifierRequest(BaseModel):
    q: int = Field(ge=0)
    radius: float = Field(default=1.0, gt=0)
    symmetric: bool = False


class GridModel(BaseModel):
    eps_base: float = 2.0
    k_min: int = 4
    k_max: int = 14


class RatesRequest(BaseModel):
    expr: str
    K: List[float] = Field(default=[-1.0, 1.0], min_length=2, max_length=2)
    m: int = Field(default=0, ge=0)
    q: int = Field(default=2, ge=0)
    radius: float = Field(default=1.0, gt=0)
    symmetric: bool = True
    grid: GridModel = GridModel()


class NegligibleRequest(BaseModel):
    expr: str
    K: List[float] = Field(default=[-1.0, 1.0], min_length=2, max_length=2)
    m: int = Field(default=0, ge=0)
    c: int = Field(default=0, ge=0)
    l: int = Field(default=0, ge=0)
    D_max: int = Field(default=3, ge=1, le=3)
    radius: float = Field(default=1.0, gt=0)
    eta: float = Field(default=asym.DEFAULT_ETA, gt=0)
    B: List[str] = ["sin", "poly(0, 0, 0, 1)"]
    grid: GridModel = GridModel(k_min=1, k_max=10)


class SpecialRequest(BaseModel):
    expr: str
    q: int = Field(default=4, ge=0)
    radius: float = Field(default=1.0, gt=0)
    omega: List[float] = Field(default=[-4.0, 4.0], min_length=2, max_length=2)
    K: List[float] = Field(default=[-0.5, 0.5], min_length=2, max_length=2)
    L: List[float] = Field(default=[-1.0, 1.0], min_length=2, max_length=2)
    c_max: int = Field(default=1, ge=0)
    l_max: int = Field(default=1, ge=0)
    grid: GridModel = GridModel(k_min=1, k_max=10)


class DemoRequest(BaseModel):
    K: List[float] = Field(default=[-1.0, 1.0], min_length=2, max_length=2)


# ---------------------------------------------------------------------------
# Helpers.

def _error_response(kind: str, message: str, status: int = 400,
                    extra: Optional[dict] = None):
    payload = {"schema": SCHEMA,
               "error": {"kind": kind, "message": message, **(extra or {})}}
    return JSONResponse(status_code=status, content=payload)


def _envelope(command: str, config: dict, result: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": config,
            "result": result,
            "metadata": {"timestamp":
                         datetime.datetime.now(datetime.timezone.utc)
                         .isoformat()}}


def _grid(g: GridModel) -> asym.EpsGrid:
    return asym.EpsGrid(base=g.eps_base, k_min=g.k_min, k_max=g.k_max)


def _family(names: List[str]) -> BoundedFamily:
    return BoundedFamily(tuple(exprdsl.parse_smooth(n) for n in names))


def _verdict_dict(v: asym.NegligibilityVerdict) -> dict:
    return {"status": v.status, "eta": v.eta,
            "soundness_ok": v.soundness_ok,
            "refutations": [{"D": D, "q_used": q, "persistent": p}
                            for D, q, p in v.refutations],
            "evidence": [r.to_dict() for r in v.evidence]}


_HANDLED = (ColombeauLabError, ValueError)


def _kind_of(exc: Exception) -> str:
    if isinstance(exc, DslSyntaxError):
        return "syntax"
    if isinstance(exc, MomentConstructionError):
        return "construction"
    if isinstance(exc, (AdmissibilityError, EmptySetError)):
        return "admissibility"
    if isinstance(exc, OrderBudgetError):
        return "budget"
    if isinstance(exc, (QuadratureError, InsufficientSamplesError)):
        return "numerical"
    return "invalid"


# ---------------------------------------------------------------------------
# Endpoints.

@app.get("/health")
def health():
    return {"schema": SCHEMA, "status": "ok"}


@app.post("/mollifier")
def mollifier_endpoint(req: MollifierRequest):
    config = req.model_dump()
    if req.q > MAX_Q:
        return _error_response("construction",
                               f"q={req.q} exceeds budget {MAX_Q}", 422)
    try:
        phi = build_moment_mollifier(req.q, req.radius, symmetric=req.symmetric)
    except MomentConstructionError as exc:
        extra = {}
        if exc.condition is not None:
            extra["condition"] = exc.condition
        return _error_response("construction", str(exc), 422, extra)
    moments = []
    worst = 0.0
    for j in range(req.q + 1):
        target = 1.0 if j == 0 else 0.0
        value = moment(phi, j)
        residual = abs(value - target)
        worst = max(worst, residual)
        moments.append({"order": j, "value": value, "residual": residual})
    result = {"mollifier": json.loads(to_json(phi)),
              "symmetric": req.symmetric, "moments": moments,
              "max_residual": worst, "within_tolerance": worst <= 1e-8}
    return _envelope("mollifier", config, result)


@app.post("/rates")
def rates_endpoint(req: RatesRequest):
    config = req.model_dump()
    try:
        R = exprdsl.parse_expr(req.expr)
        phi = build_moment_mollifier(req.q, req.radius, symmetric=req.symmetric)
        K = CompactSet(req.K[0], req.K[1])
        measured = asym.sweep(R, phi, K, req.m, _grid(req.grid))
        samples = [(e, est.value) for e, est in measured]
        try:
            report = asym.fit_rate(samples).to_dict()
        except InsufficientSamplesError:
            report = asym._constant_report(samples).to_dict()
            report["note"] = ("all samples at the noise floor or constant; "
                              "slope reported as 0")
        stable = all(est.stability_flag for _, est in measured)
        return _envelope("rates", config,
                         {"report": report, "sup_stable": stable,
                          "seminorm_id": f"K[{K.lo}..{K.hi}]-m{req.m}"})
    except _HANDLED as exc:
        return _error_response(_kind_of(exc), str(exc), 422)


@app.post("/negligible")
def negligible_endpoint(req: NegligibleRequest):
    config = req.model_dump()
    try:
        R = exprdsl.parse_expr(req.expr)
        K = CompactSet(req.K[0], req.K[1])
        verdict = asym.negligibility_falsifier(
            R, K, req.m, c=req.c, l=req.l, D_max=req.D_max,
            radius=req.radius, grid=_grid(req.grid), B=_family(req.B),
            eta=req.eta)
        return _envelope("negligible", config, _verdict_dict(verdict))
    except _HANDLED as exc:
        return _error_response(_kind_of(exc), str(exc), 422)


@app.post("/special")
def special_endpoint(req: SpecialRequest):
    config = req.model_dump()
    try:
        R = exprdsl.parse_expr(req.expr)
        omega = Domain(req.omega[0], req.omega[1])
        rho = build_moment_mollifier(req.q, req.radius, symmetric=True)
        scfg = specialmap.make_config(rho, omega)
        K = CompactSet(req.K[0], req.K[1])
        L = CompactSet(req.L[0], req.L[1])
        grid = _grid(req.grid)
        kernel_reports = []
        for c in range(req.c_max + 1):
            for l in range(req.l_max + 1):
                samples = [(e, specialmap.psi_kernel_norm(
                    scfg, e, K, c, l=l, L=L).value) for e in grid.eps]
                rep = asym.fit_rate(samples)
                kernel_reports.append({"c": c, "l": l,
                                       "expected_slope": -(1 + c + l),
                                       "report": rep.to_dict()})
        xs = np.linspace(K.lo, K.hi, 401)
        samples = []
        for e in grid.eps:
            vals = np.abs(specialmap.special_rep(R, scfg, e, xs, 0))
            samples.append((e, float(np.max(vals))))
        try:
            expr_report = asym.fit_rate(samples).to_dict()
        except InsufficientSamplesError:
            expr_report = asym._constant_report(samples).to_dict()
        return _envelope("special", config,
                         {"kernel_norms": kernel_reports,
                          "expression": expr_report})
    except _HANDLED as exc:
        return _error_response(_kind_of(exc), str(exc), 422)


@app.post("/demo")
def demo_endpoint(req: DemoRequest):
    """The headline phenomena: delta is moderate but not negligible,
    embedding-minus-inclusion of a smooth function is negligible, and
    the Heaviside square differs from Heaviside in the algebra."""
    config = req.model_dump()
    try:
        K = CompactSet(req.K[0], req.K[1])
        phi = build_moment_mollifier(2, 1.0, symmetric=True)

        R_delta = exprdsl.parse_expr("iota(delta)")
        mv = asym.moderateness_probe(R_delta, phi, K, 0)
        delta_rate = asym.fit_rate([(e, est.value) for e, est in
                                    asym.sweep(R_delta, phi, K, 0)])
        nd = asym.negligibility_falsifier(R_delta, K, 0, c=0, l=0, D_max=3)

        R_emb = exprdsl.parse_expr("iota(reg(sin)) - sigma(sin)")
        ne = asym.negligibility_falsifier(
            R_emb, K, 0, c=0, l=0, D_max=3,
            grid=asym.EpsGrid(2.0, 1, 10))

        R_heavi = exprdsl.parse_expr("iota(H)*iota(H) - iota(H)")
        nh = asym.negligibility_falsifier(R_heavi, K, 0, c=0, l=0, D_max=3)

        result = {
            "delta": {"expr": "iota(delta)",
                      "moderateness": mv.status,
                      "witness": {"c": mv.witness[0], "d": mv.witness[1]},
                      "sweep_slope": delta_rate.slope,
                      "negligibility": _verdict_dict(nd)},
            "embedding": {"expr": "iota(reg(sin)) - sigma(sin)",
                          "negligibility": _verdict_dict(ne)},
            "heaviside": {"expr": "iota(H)*iota(H) - iota(H)",
                          "negligibility": _verdict_dict(nh)},
        }
        return _envelope("demo", config, result)
    except _HANDLED as exc:
        return _error_response(_kind_of(exc), str(exc), 422)
