"""Sup-type seminorm families and positive-coefficient polynomial semirings.

Four families: ``norm_Km`` on smooth functions, ``norm_c`` on mollifiers,
``kernel_norm`` on convolution kernels (via the 1D reduction to a single
variable t = y - x) and ``defect_norm`` measuring the distance of a
kernel from the delta kernel against a bounded family B.

Sups are taken on uniform grids with local refinement around the
arg-max; the SupEstimate carries a stability flag so callers can tell a
converged sup from a doubtful one.

The defect integrand f(x+t) - f(x) is evaluated with the Taylor
polynomial of f at x subtracted and re-added through measured kernel
moments.  This keeps quadrature roundoff proportional to the defect
itself (which decays like eps^{q+1}) instead of to |f|, which would
drown small-eps rate fits in noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ColombeauLabError, OrderBudgetError
from .funcspace import CompactSet, SmoothFunction
from .mollifier import ConvKernel, Mollifier, moment
from .quadrature import DEFAULT_QUAD, QuadConfig, composite_gauss

DEFAULT_GRID = 2001
STABILITY_RTOL = 1e-6

_DEFECT_PANELS = 24
_DEFECT_GRID = 801


@dataclass(frozen=True)
class SupEstimate:
    value: float
    grid_points: int
    refinement_passes: int
    stability_flag: bool


@dataclass(frozen=True)
class BoundedFamily:
    """Finite stand-in for a bounded subset of smooth functions."""

    members: Tuple[SmoothFunction, ...]

    def __post_init__(self):
        if not self.members:
            raise ColombeauLabError("bounded family must be nonempty")

    def require_order(self, c: int):
        for f in self.members:
            if f.max_order < c:
                raise OrderBudgetError(
                    f"family member {f.name or 'f'} has budget {f.max_order} < {c}")


def grid_sup(values_fn, lo: float, hi: float, npts: int = DEFAULT_GRID,
             passes: int = 2, factor: int = 4) -> SupEstimate:
    """Sup of a vectorized nonnegative function by grid + local refinement."""
    if hi < lo:
        raise ColombeauLabError("grid_sup needs lo <= hi")
    if hi == lo:
        v = float(values_fn(np.array([lo]))[0])
        return SupEstimate(v, 1, 0, True)
    xs = np.linspace(lo, hi, npts)
    vals = np.asarray(values_fn(xs))
    i = int(np.argmax(vals))
    best = float(vals[i])
    spacing = (hi - lo) / (npts - 1)
    center = xs[i]
    done = 0
    stable = False
    for _ in range(passes):
        a = max(lo, center - spacing)
        b = min(hi, center + spacing)
        sub = np.linspace(a, b, 2 * factor + 1)
        sv = np.asarray(values_fn(sub))
        j = int(np.argmax(sv))
        new = max(best, float(sv[j]))
        done += 1
        stable = (new - best) < STABILITY_RTOL * max(new, 1e-300)
        best, center = new, sub[j]
        spacing = (b - a) / (2 * factor)
    return SupEstimate(best, npts, done, stable)


def norm_Km(f: SmoothFunction, K: CompactSet, m: int,
            npts: int = DEFAULT_GRID) -> SupEstimate:
    """sup over x in K, j <= m of |f^(j)(x)|."""
    if m > f.max_order:
        raise OrderBudgetError(f"m={m} exceeds budget {f.max_order}")
    lo, hi = K.lo, K.hi
    if f.support is not None:
        lo, hi = max(lo, f.support.lo), min(hi, f.support.hi)
        if lo > hi:
            return SupEstimate(0.0, 0, 0, True)

    def values(xs):
        return np.max([np.abs(f(xs, j)) for j in range(m + 1)], axis=0)

    return grid_sup(values, lo, hi, npts)


def norm_c(phi: Mollifier, c: int, npts: int = DEFAULT_GRID) -> SupEstimate:
    """sup over the whole line, j <= c of |phi^(j)|; the sup lives on supp."""
    return norm_Km(phi.func, CompactSet(-phi.radius, phi.radius), c, npts)


def kernel_norm(kern: ConvKernel, K: CompactSet, c: int,
                L: CompactSet, l: int, npts: int = DEFAULT_GRID,
                cross_check: bool = False) -> SupEstimate:
    """sup over x in K, y in L, alpha <= c, beta <= l of the kernel derivatives.

    Since every derivative of phi(y - x) is a signed derivative of phi at
    t = y - x, the 2D sup reduces to a 1D sup over the reachable window
    t in [L.lo - K.hi, L.hi - K.lo].
    """
    phi = kern.base
    if c + l > phi.func.max_order:
        raise OrderBudgetError(f"c+l={c + l} exceeds budget {phi.func.max_order}")
    lo = max(L.lo - K.hi, -phi.radius)
    hi = min(L.hi - K.lo, phi.radius)
    if lo > hi:
        return SupEstimate(0.0, 0, 0, True)

    def values(ts):
        return np.max([np.abs(phi(ts, j)) for j in range(c + l + 1)], axis=0)

    est = grid_sup(values, lo, hi, npts)
    if cross_check:
        xg = np.linspace(K.lo, K.hi, 41)
        yg = np.linspace(L.lo, L.hi, 41)
        coarse = 0.0
        for a in range(c + 1):
            for b in range(l + 1):
                coarse = max(coarse, float(np.max(np.abs(
                    kern.accessor(xg[:, None], yg[None, :], a, b)))))
        if coarse > est.value * (1 + 1e-9) + 1e-300:
            raise ColombeauLabError(
                f"kernel 1D reduction {est.value} below 2D grid sup {coarse}")
    return est


def defect_norm(kern: ConvKernel, K: CompactSet, c: int, B: BoundedFamily,
                cfg: QuadConfig = DEFAULT_QUAD,
                npts: int = _DEFECT_GRID) -> SupEstimate:
    """sup over x in K, j <= c, f in B of |d^j/dx^j [(f * phi_check)(x) - f(x)]|."""
    B.require_order(c)
    phi = kern.base
    r = phi.radius
    t, w = composite_gauss(-r, r, _DEFECT_PANELS)
    phi_t = phi(t, 0)
    wphi = w * phi_t

    def defect_values(xs, f, j):
        # Taylor order: need f^(j+i) for i <= M
        M = min(phi.q + 1, f.max_order - j)
        derivs = [f(xs[:, None] + t[None, :], j)]  # f^(j) on the t-fan
        at_x = [f(xs, j + i) for i in range(M + 1)]
        taylor = np.zeros((xs.size, t.size))
        tp = np.ones_like(t)
        for i in range(M + 1):
            taylor += np.outer(at_x[i] / math.factorial(i), tp)
            tp = tp * t
        remainder = (derivs[0] - taylor) @ wphi
        # re-add the Taylor part through measured moments; m0 - 1 absorbs
        # the -f^(j)(x) term so nothing large is ever subtracted
        out = remainder + at_x[0] * (moment(phi, 0) - 1.0)
        for i in range(1, M + 1):
            out = out + at_x[i] * (moment(phi, i) / math.factorial(i))
        return np.abs(out)

    best = SupEstimate(0.0, 0, 0, True)
    for f in B.members:
        for j in range(c + 1):
            est = grid_sup(lambda xs, f=f, j=j: defect_values(xs, f, j),
                           K.lo, K.hi, npts)
            if est.value > best.value:
                best = est
    return best


# ---------------------------------------------------------------------------
# Positive-coefficient polynomial semirings P_k (no z-variables active) and
# the ideal I_k (every monomial touches a z-variable).

@dataclass(frozen=True)
class PosPoly:
    """Polynomial with nonnegative coefficients in y_0..y_k, z_0..z_k."""

    k: int
    monomials: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...], float], ...]

    def __post_init__(self):
        for alpha, beta, coeff in self.monomials:
            if len(alpha) != self.k + 1 or len(beta) != self.k + 1:
                raise ColombeauLabError("exponent length must equal k+1")
            if coeff < 0:
                raise ColombeauLabError("coefficients must be nonnegative")

    @property
    def in_P(self) -> bool:
        return all(all(b == 0 for b in beta) or coeff == 0
                   for _, beta, coeff in self.monomials)

    @property
    def in_I(self) -> bool:
        return all(any(b > 0 for b in beta)
                   for _, beta, coeff in self.monomials if coeff > 0)

    def __add__(self, other: "PosPoly") -> "PosPoly":
        if other.k != self.k:
            raise ColombeauLabError("variable counts differ")
        return PosPoly(self.k, self.monomials + other.monomials)

    def __mul__(self, other: "PosPoly") -> "PosPoly":
        if other.k != self.k:
            raise ColombeauLabError("variable counts differ")
        out = []
        for a1, b1, c1 in self.monomials:
            for a2, b2, c2 in other.monomials:
                out.append((tuple(x + y for x, y in zip(a1, a2)),
                            tuple(x + y for x, y in zip(b1, b2)), c1 * c2))
        return PosPoly(self.k, tuple(out))


def monomial(k: int, alpha: Sequence[int], beta: Sequence[int],
             coeff: float) -> PosPoly:
    return PosPoly(k, ((tuple(alpha), tuple(beta), float(coeff)),))


def eval_pospoly(lam: PosPoly, y: Sequence[float], z: Sequence[float]) -> float:
    if len(y) != lam.k + 1 or len(z) != lam.k + 1:
        raise ColombeauLabError("argument lengths must equal k+1")
    if any(v < 0 for v in y) or any(v < 0 for v in z):
        raise ColombeauLabError("seminorm arguments must be nonnegative")
    total = 0.0
    for alpha, beta, coeff in lam.monomials:
        term = coeff
        for v, e in zip(y, alpha):
            term *= v ** e
        for v, e in zip(z, beta):
            term *= v ** e
        total += term
    return total


def pospoly_to_text(lam: PosPoly) -> str:
    parts = []
    for alpha, beta, coeff in lam.monomials:
        factors = [repr(coeff)]
        for i, e in enumerate(alpha):
            if e:
                factors.append(f"y{i}" + (f"^{e}" if e > 1 else ""))
        for i, e in enumerate(beta):
            if e:
                factors.append(f"z{i}" + (f"^{e}" if e > 1 else ""))
        parts.append("*".join(factors))
    return " + ".join(parts) if parts else "0"
