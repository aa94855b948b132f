"""Mollifiers with unit integral and vanishing moments, plus scaling.

The profile is p(x/r) * bump(x/r) / r with p polynomial.  Coefficients
are solved from the linear moment system in a Legendre basis (better
conditioned than raw monomials), then stored in the power basis.

By default the construction pins the (q+1)-th moment to a nonzero value
(r^{q+1}) so that defect rates sit exactly at epsilon^{q+1}; with a pure
even ansatz the (q+1)-th moment of an even-q mollifier would vanish and
every measured rate would land one order higher.  ``symmetric=True``
restores the even ansatz p(x^2)*bump.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as L
from numpy.polynomial import polynomial as P

from .errors import AdmissibilityError, MomentConstructionError
from .funcspace import (CompactSet, Domain, SmoothFunction, catalog,
                        f_dilate, f_product, f_scale, _make_poly)
from .quadrature import composite_gauss

MAX_Q = 12
COND_LIMIT = 1e12

# 48 x 15-point panels are machine-exact on p(t)*bump(t) integrands
_MOMENT_PANELS = 48


@lru_cache(maxsize=None)
def _profile_moment(k: int) -> float:
    """integral of t^k * bump_1(t) over [-1, 1]."""
    if k % 2 == 1:
        return 0.0
    bump = catalog("bump", 1.0)
    t, w = composite_gauss(-1.0, 1.0, _MOMENT_PANELS)
    return float(w @ (t ** k * bump(t, 0)))


@dataclass(frozen=True)
class Mollifier:
    """Compactly supported smooth kernel with q vanishing moments."""

    func: SmoothFunction
    radius: float
    q: int
    coefficients: tuple  # power-basis coefficients of p(t), t = x / radius
    unit_integral: bool = True

    def __call__(self, x, order: int = 0):
        return self.func(x, order)

    @property
    def support(self) -> CompactSet:
        return CompactSet(-self.radius, self.radius)


@dataclass(frozen=True)
class ConvKernel:
    """Convolution kernel (x, y) -> phi(y - x) with derivative access."""

    base: Mollifier

    def accessor(self, x, y, alpha: int = 0, beta: int = 0):
        return (-1.0) ** alpha * self.base.func(np.asarray(y) - np.asarray(x),
                                                alpha + beta)


def _func_from_coefficients(coefficients, radius: float) -> SmoothFunction:
    p = _make_poly(coefficients)
    profile = f_product(p, catalog("bump", 1.0))
    return f_scale(1.0 / radius, f_dilate(profile, radius))


def build_moment_mollifier(q: int, radius: float,
                           symmetric: bool = False) -> Mollifier:
    """Mollifier with unit integral and vanishing moments of orders 1..q.

    Unless ``symmetric`` is set, the (q+1)-th moment is pinned to
    radius^{q+1} so the kernel's approximation order is exactly q.
    """
    if q < 0 or q > MAX_Q:
        raise MomentConstructionError(f"q={q} outside budget 0..{MAX_Q}")
    if radius <= 0:
        raise MomentConstructionError("radius must be positive")

    if symmetric:
        # even Legendre basis, even-moment constraints only
        degrees = list(range(0, 2 * (q // 2) + 1, 2))
        targets = {j: (1.0 if j == 0 else 0.0) for j in degrees}
    else:
        degrees = list(range(q + 2))
        targets = {j: (1.0 if j == 0 else 0.0) for j in range(q + 1)}
        targets[q + 1] = 1.0

    rows = sorted(targets)
    A = np.empty((len(rows), len(degrees)))
    for col, e in enumerate(degrees):
        mono = L.leg2poly([0.0] * e + [1.0])
        for rix, j in enumerate(rows):
            A[rix, col] = sum(c * _profile_moment(j + m)
                              for m, c in enumerate(mono) if c != 0.0)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise MomentConstructionError(
            f"moment matrix condition {cond:.3g} exceeds {COND_LIMIT:.0e}",
            condition=cond)
    rhs = np.array([targets[j] for j in rows])
    b = np.linalg.solve(A, rhs)
    for _ in range(2):  # iterative refinement against solver roundoff
        b += np.linalg.solve(A, rhs - A @ b)

    leg = np.zeros(degrees[-1] + 1)
    leg[degrees] = b
    coefficients = tuple(float(c) for c in L.leg2poly(leg))
    return Mollifier(func=_func_from_coefficients(coefficients, radius),
                     radius=float(radius), q=int(q),
                     coefficients=coefficients)


def scale(phi: Mollifier, eps: float) -> Mollifier:
    """S_eps phi = phi(. / eps) / eps; unit integral preserved exactly."""
    if not 0 < eps <= 1:
        raise ValueError("scaling parameter must lie in (0, 1]")
    r = phi.radius * eps
    return Mollifier(func=_func_from_coefficients(phi.coefficients, r),
                     radius=r, q=phi.q, coefficients=phi.coefficients,
                     unit_integral=phi.unit_integral)


def starred(phi: Mollifier) -> ConvKernel:
    return ConvKernel(base=phi)


def admissible(phi: Mollifier, x: float, omega: Domain) -> bool:
    """True iff the support of phi(. - x) sits strictly inside omega."""
    return (x - phi.radius > omega.lo) and (x + phi.radius < omega.hi)


def to_json(phi: Mollifier) -> str:
    return json.dumps({"q": phi.q, "radius": phi.radius,
                       "coefficients": list(phi.coefficients)})


def from_json(text: str) -> Mollifier:
    data = json.loads(text)
    coefficients = tuple(float(c) for c in data["coefficients"])
    return Mollifier(func=_func_from_coefficients(coefficients, data["radius"]),
                     radius=float(data["radius"]), q=int(data["q"]),
                     coefficients=coefficients)


def moment(phi: Mollifier, j: int) -> float:
    """integral of x^j phi(x) dx by composite Gauss quadrature."""
    x, w = composite_gauss(-phi.radius, phi.radius, _MOMENT_PANELS)
    return float(w @ (x ** j * phi(x, 0)))
