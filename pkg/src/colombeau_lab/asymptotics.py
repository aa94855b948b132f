"""Epsilon-sweep rate measurement, moderateness witnesses, negligibility
falsification.

The falsifier implements the quantifier strategy behind the injectivity
of the distribution embedding: to refute negligibility up to polynomial
degree D, sweep with a mollifier of moment class q = D*(1+c+l)+1, so
that every admissible bound of degree <= D (each of whose monomials
carries at least one defect factor decaying like eps^{q+1}) tends to
zero, while a genuinely non-negligible representative keeps its seminorm
above the persistence threshold eta.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (AdmissibilityError, InsufficientSamplesError)
from .funcspace import CompactSet
from .genfunc import Conv, Representative, eval as rep_eval
from .mollifier import Mollifier, build_moment_mollifier, scale, starred
from .quadrature import DEFAULT_QUAD, QuadConfig
from .seminorm import (BoundedFamily, PosPoly, SupEstimate, defect_norm,
                       grid_sup, monomial, norm_c)

NOISE_FLOOR = 1e-14
# samples within a decade of the noise floor are still contaminated;
# rate fits only trust values above this
FIT_FLOOR = 1e-13
DEFAULT_ETA = 1e-3


def worker_count() -> int:
    raw = os.environ.get("COLOMBEAU_LAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n) if n else 1


@dataclass(frozen=True)
class EpsGrid:
    base: float = 2.0
    k_min: int = 4
    k_max: int = 14

    def __post_init__(self):
        if self.base <= 1:
            raise ValueError("eps grid base must exceed 1")
        if self.k_min > self.k_max:
            raise ValueError("k_min must not exceed k_max")
        if self.base ** (-self.k_min) > 1:
            raise ValueError("eps grid must lie in (0, 1]")

    @property
    def eps(self) -> Tuple[float, ...]:
        return tuple(self.base ** (-k) for k in range(self.k_min, self.k_max + 1))


DEFAULT_GRID = EpsGrid()


@dataclass(frozen=True)
class RateReport:
    samples: Tuple[Tuple[float, float], ...]
    slope: float
    intercept: float
    stderr: float
    window: Tuple[int, ...]
    r_squared: float
    ok: bool

    def to_dict(self) -> dict:
        return {"samples": [[e, v] for e, v in self.samples],
                "slope": self.slope, "intercept": self.intercept,
                "stderr": self.stderr, "window": list(self.window),
                "r_squared": self.r_squared, "ok": self.ok}


@dataclass(frozen=True)
class ModerationVerdict:
    status: str  # 'moderate-witnessed' | 'undetermined'
    witness: Optional[Tuple[int, int, PosPoly]]  # (c, d, lambda)
    evidence: RateReport


@dataclass(frozen=True)
class NegligibilityVerdict:
    status: str  # 'consistent-with-negligible' | 'refuted-to-degree(D)'
    refutations: Tuple[Tuple[int, int, float], ...]  # (D, q_used, persistent)
    evidence: Tuple[RateReport, ...]
    eta: float
    soundness_ok: bool = True


def sweep(R: Representative, phi: Mollifier, K: CompactSet, m: int,
          grid: EpsGrid = DEFAULT_GRID,
          cfg: QuadConfig = DEFAULT_QUAD) -> List[Tuple[float, SupEstimate]]:
    """(eps, ||R(S_eps phi, .)||_{K,m}) per grid point."""
    eps_list = grid.eps
    r0 = phi.radius * eps_list[0]
    if K.lo - r0 <= R.domain.lo or K.hi + r0 >= R.domain.hi:
        raise AdmissibilityError(
            "mollifier support leaves the domain at the largest eps; "
            "shrink K or start the eps grid lower")

    def one(e):
        phe = scale(phi, e)

        def values(xs):
            return np.max([np.abs(rep_eval(R, Conv(phe), xs, j, cfg))
                           for j in range(m + 1)], axis=0)

        return grid_sup(values, K.lo, K.hi)

    n = worker_count()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            ests = list(pool.map(one, eps_list))
    else:
        ests = [one(e) for e in eps_list]
    return list(zip(eps_list, ests))


def fit_rate(samples: Sequence[Tuple[float, float]],
             window: Optional[Sequence[int]] = None,
             floor: float = FIT_FLOOR) -> RateReport:
    """Least-squares slope of log(value) against log(eps).

    Without an explicit window, samples at or below the fit floor are
    excluded as noise-dominated.
    """
    pairs = [(float(e), float(v)) for e, v in samples]
    if window is None:
        window = [i for i, (_, v) in enumerate(pairs) if v > floor]
    window = tuple(window)
    if len(window) < 4:
        raise InsufficientSamplesError(
            f"only {len(window)} usable samples above the noise floor")
    le = np.log([pairs[i][0] for i in window])
    lv = np.log([pairs[i][1] for i in window])
    n = len(window)
    A = np.vstack([le, np.ones(n)]).T
    coef, res, _, _ = np.linalg.lstsq(A, lv, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    pred = A @ coef
    ss_res = float(np.sum((lv - pred) ** 2))
    ss_tot = float(np.sum((lv - np.mean(lv)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if n > 2:
        sxx = float(np.sum((le - np.mean(le)) ** 2))
        stderr = math.sqrt(max(ss_res, 0.0) / ((n - 2) * sxx)) if sxx > 0 else 0.0
    else:
        stderr = 0.0
    ok = r2 >= 0.98
    return RateReport(samples=tuple(pairs), slope=slope, intercept=intercept,
                      stderr=stderr, window=window, r_squared=r2, ok=ok)


def _constant_report(samples) -> RateReport:
    return RateReport(samples=tuple((float(e), float(v)) for e, v in samples),
                      slope=0.0, intercept=0.0, stderr=0.0, window=(),
                      r_squared=1.0, ok=True)


def moderateness_probe(R: Representative, phi: Mollifier, K: CompactSet,
                       m: int, grid: EpsGrid = DEFAULT_GRID,
                       c_max: int = 2, d_max: int = 3,
                       cfg: QuadConfig = DEFAULT_QUAD) -> ModerationVerdict:
    """Search the smallest (c, d) with C*y_c^d dominating the sweep.

    One-sided by design: 'undetermined' never asserts non-moderateness.
    A candidate (c, d) is accepted only when the ratio value / y_c^d
    stays bounded as eps -> 0 (fitted ratio slope >= -0.05), which
    rejects witnesses whose constant is only pinned by the largest eps.
    """
    measured = sweep(R, phi, K, m, grid, cfg)
    values = np.array([est.value for _, est in measured])
    eps_list = np.array([e for e, _ in measured])
    samples = list(zip(eps_list, values))
    if np.all(values <= NOISE_FLOOR):
        lam = monomial(0, (0,), (0,), float(np.max(values)))
        return ModerationVerdict("moderate-witnessed", (0, 0, lam),
                                 _constant_report(samples))
    try:
        report = fit_rate(samples)
    except InsufficientSamplesError:
        report = _constant_report(samples)
    for c in range(c_max + 1):
        y = np.array([norm_c(scale(phi, e), c).value for e in eps_list])
        for d in range(d_max + 1):
            ratio = values / np.maximum(y ** d, 1e-300)
            mask = values > NOISE_FLOOR
            if mask.sum() >= 4:
                le, lr = np.log(eps_list[mask]), np.log(ratio[mask])
                r_slope = float(np.polyfit(le, lr, 1)[0])
            else:
                r_slope = 0.0
            if r_slope >= -0.05:
                C = float(np.max(ratio))
                lam = monomial(0, (d,), (0,), C)
                # post-hoc: the witness must dominate every sample
                assert all(v <= C * yy ** d * (1 + 1e-12) + 1e-300
                           for v, yy in zip(values, y))
                return ModerationVerdict("moderate-witnessed", (c, d, lam),
                                         report)
    return ModerationVerdict("undetermined", None, report)


def defect_sweep(phi: Mollifier, K: CompactSet, c: int, B: BoundedFamily,
                 grid: EpsGrid = DEFAULT_GRID,
                 cfg: QuadConfig = DEFAULT_QUAD) -> RateReport:
    samples = [(e, defect_norm(starred(scale(phi, e)), K, c, B, cfg).value)
               for e in grid.eps]
    return fit_rate(samples)


def negligibility_falsifier(R: Representative, K: CompactSet, m: int,
                            c: int, l: int, D_max: int = 3,
                            radius: float = 1.0,
                            grid: EpsGrid = DEFAULT_GRID,
                            B: Optional[BoundedFamily] = None,
                            eta: float = DEFAULT_ETA,
                            cfg: QuadConfig = DEFAULT_QUAD) -> NegligibilityVerdict:
    """Refute degree-bounded negligibility or report consistency.

    For each D = 1..D_max, sweeps with a mollifier of moment class
    q = D*(1+c+l)+1.  If the seminorm persists above eta on the small-eps
    half of the grid, degree D is refuted: every degree-<=D bound whose
    monomials all carry a defect factor must vanish in this regime.
    """
    if D_max > 3:
        raise ValueError("D_max must be <= 3 (derivative-order budget)")
    if B is None:
        from .funcspace import catalog
        B = BoundedFamily((catalog("sin"), catalog("poly", 0, 0, 0, 1)))
    eps_list = grid.eps
    half = [i for i in range(len(eps_list))
            if i >= (len(eps_list) - 1) / 2]
    refutations = []
    evidence = []
    soundness_ok = True
    decay_report = None
    for D in range(1, D_max + 1):
        q = D * (1 + c + l) + 1
        # symmetric kernels: persistent values of jump products then sit at
        # their even-mollifier closed forms, and the defect decays at least
        # one order faster than the degree argument needs
        phi = build_moment_mollifier(q, radius, symmetric=True)
        measured = sweep(R, phi, K, m, grid, cfg)
        samples = [(e, est.value) for e, est in measured]
        persistent = min(samples[i][1] for i in half)
        if persistent >= eta:
            refutations.append((D, q, persistent))
            # soundness: every ideal monomial y^a z of total degree <= D
            # (so a <= D-1, one defect factor) vanishes on this window
            for i in half:
                e = eps_list[i]
                y = norm_c(scale(phi, e), c).value
                z = defect_norm(starred(scale(phi, e)), K, c, B, cfg).value
                for a in range(0, D):
                    if (y ** a) * z >= eta / 10:
                        soundness_ok = False
            evidence.append(_constant_report(samples))
        else:
            try:
                rep = fit_rate(samples)
            except InsufficientSamplesError:
                rep = _constant_report(samples)
            evidence.append(rep)
            if decay_report is None:
                decay_report = rep
    if refutations:
        worst = max(D for D, _, _ in refutations)
        status = f"refuted-to-degree({worst})"
    else:
        status = "consistent-with-negligible"
    return NegligibilityVerdict(status=status, refutations=tuple(refutations),
                                evidence=tuple(evidence), eta=eta,
                                soundness_ok=soundness_ok)
