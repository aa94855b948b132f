"""Smooth real functions on the line with analytic derivative access.

Evaluation is vectorized over numpy arrays.  Derivatives of the
non-elementary catalog entries (bump, plateau and everything composed
from them) are obtained from truncated Taylor-jet arithmetic, so every
reported derivative is analytic, not a finite difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CatalogError, OrderBudgetError

DEFAULT_MAX_ORDER = 12

# bump profiles underflow to exactly 0 once the exponent passes this
_EXP_CUTOFF = 700.0


@dataclass(frozen=True)
class Domain:
    """Open interval (lo, hi); infinite endpoints allowed."""

    lo: float = -math.inf
    hi: float = math.inf
    dimension: int = 1

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty domain ({self.lo}, {self.hi})")
        if self.dimension != 1:
            raise ValueError("only dimension 1 is supported")


FULL_LINE = Domain()


@dataclass(frozen=True)
class CompactSet:
    """Closed bounded interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("compact set needs finite endpoints")
        if self.lo > self.hi:
            raise ValueError(f"empty compact set [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo


def compactly_contained(K: CompactSet, L) -> bool:
    """K strictly inside the interior of L (CompactSet or Domain)."""
    return K.lo > L.lo and K.hi < L.hi


# ---------------------------------------------------------------------------
# Taylor-jet arithmetic.  A jet is a list of ndarrays [c0, ..., cn] with
# c_k = f^(k)(x) / k!, all of the same shape.

def _jet_mul(a, b):
    n = len(a)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def _jet_recip(a):
    n = len(a)
    out = [1.0 / a[0]]
    for k in range(1, n):
        acc = sum(a[i] * out[k - i] for i in range(1, k + 1))
        out.append(-acc / a[0])
    return out


def _jet_exp(a):
    n = len(a)
    out = [np.exp(a[0])]
    for k in range(1, n):
        acc = sum(i * a[i] * out[k - i] for i in range(1, k + 1))
        out.append(acc / k)
    return out


def _jet_linear(t0, slope, n):
    """Jet of the affine map x -> t0 + slope*(x - x0), evaluated at x0."""
    zeros = np.zeros_like(t0)
    jet = [t0]
    if n >= 1:
        jet.append(np.full_like(t0, slope))
    jet.extend(zeros for _ in range(n - 1))
    return jet


def _bump_jet(x, r, n):
    """Jet of exp(-1/(1-(x/r)^2)) at interior points x (|x| < r strictly)."""
    s0 = 1.0 - (x / r) ** 2
    s = [s0]
    if n >= 1:
        s.append(-2.0 * x / r ** 2)
    if n >= 2:
        s.append(np.full_like(x, -1.0 / r ** 2))
    s.extend(np.zeros_like(x) for _ in range(n - 2))
    u = [-c for c in _jet_recip(s)]
    return _jet_exp(u)


def _bump_eval(x, order, r):
    out = np.zeros_like(x)
    mask = 1.0 - (x / r) ** 2 > 1.0 / _EXP_CUTOFF
    if np.any(mask):
        jet = _bump_jet(x[mask], r, order)
        out[mask] = jet[order] * math.factorial(order)
    return out


def _h_jet(t_jet):
    """Jet of exp(-1/t) for t > 0."""
    u = [-c for c in _jet_recip(t_jet)]
    return _jet_exp(u)


def _step_jet(t0, dtdx, n):
    """Jet of the smooth step h(t)/(h(t)+h(1-t)) on interior points.

    Caller guarantees 0 < t0 < 1 with margin 1/_EXP_CUTOFF.
    """
    ha = _h_jet(_jet_linear(t0, dtdx, n))
    hb = _h_jet(_jet_linear(1.0 - t0, -dtdx, n))
    den = [p + q for p, q in zip(ha, hb)]
    return _jet_mul(ha, _jet_recip(den))


def _step_jet_clamped(t0, dtdx, n):
    """Jet of the smooth step extended by its constant values 0 and 1."""
    tiny = 1.0 / _EXP_CUTOFF
    jet = [np.zeros_like(t0) for _ in range(n + 1)]
    jet[0][t0 >= 1.0 - tiny] = 1.0
    mid = (t0 > tiny) & (t0 < 1.0 - tiny)
    if np.any(mid):
        inner = _step_jet(t0[mid], dtdx, n)
        for k in range(n + 1):
            jet[k][mid] = inner[k]
    return jet


def _plateau_eval(x, order, a, b, delta):
    tiny = 1.0 / _EXP_CUTOFF
    out = np.zeros_like(x)
    t_rise = (x - (a - delta)) / delta
    t_fall = ((b + delta) - x) / delta
    flat = (t_rise >= 1.0 - tiny) & (t_fall >= 1.0 - tiny)
    if order == 0:
        out[flat] = 1.0
    interior = (np.minimum(t_rise, t_fall) > tiny) & ~flat
    if np.any(interior):
        n = order
        jr = _step_jet_clamped(t_rise[interior], 1.0 / delta, n)
        jf = _step_jet_clamped(t_fall[interior], -1.0 / delta, n)
        prod = _jet_mul(jr, jf)
        out[interior] = prod[order] * math.factorial(order)
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothFunction:
    """Real function with analytic derivatives up to ``max_order``.

    ``fn(x, order)`` receives a float ndarray and returns one of the same
    shape.  Evaluation outside the declared support is exactly zero.
    """

    fn: Callable[[np.ndarray, int], np.ndarray] = field(repr=False)
    max_order: int = DEFAULT_MAX_ORDER
    support: Optional[CompactSet] = None
    name: str = ""
    spec: Optional[tuple] = None

    def __call__(self, x, order: int = 0):
        if order < 0:
            raise ValueError("negative derivative order")
        if order > self.max_order:
            raise OrderBudgetError(
                f"order {order} exceeds budget {self.max_order} of {self.name or 'function'}")
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        arr = np.atleast_1d(arr)
        if self.support is not None:
            out = np.zeros_like(arr)
            inside = (arr > self.support.lo) & (arr < self.support.hi)
            if np.any(inside):
                out[inside] = self.fn(arr[inside], order)
        else:
            out = self.fn(arr, order)
        return float(out[0]) if scalar else out


def _poly_fn(coeffs):
    coeffs = np.asarray(coeffs, dtype=float)
    cache = {0: coeffs}

    def fn(x, order):
        while order not in cache:
            k = max(cache)
            prev = cache[k]
            cache[k + 1] = P.polyder(prev) if len(prev) > 1 else np.zeros(1)
        return P.polyval(x, cache[order])

    return fn


def _make_poly(coeffs):
    return SmoothFunction(_poly_fn(coeffs), max_order=64, name="poly",
                          spec=("poly",) + tuple(float(c) for c in coeffs))


def f_sum(f: SmoothFunction, g: SmoothFunction) -> SmoothFunction:
    support = None
    if f.support is not None and g.support is not None:
        support = CompactSet(min(f.support.lo, g.support.lo),
                             max(f.support.hi, g.support.hi))
    return SmoothFunction(lambda x, j: f.fn(x, j) + g.fn(x, j),
                          max_order=min(f.max_order, g.max_order),
                          support=support, name=f"({f.name}+{g.name})")


def f_product(f: SmoothFunction, g: SmoothFunction) -> SmoothFunction:
    support = f.support or g.support
    if f.support is not None and g.support is not None:
        lo, hi = max(f.support.lo, g.support.lo), min(f.support.hi, g.support.hi)
        support = CompactSet(lo, hi) if lo <= hi else CompactSet(0.0, 0.0)

    def fn(x, j):
        return sum(math.comb(j, i) * f.fn(x, i) * g.fn(x, j - i) for i in range(j + 1))

    return SmoothFunction(fn, max_order=min(f.max_order, g.max_order),
                          support=support, name=f"({f.name}*{g.name})")


def f_scale(c: float, f: SmoothFunction) -> SmoothFunction:
    return SmoothFunction(lambda x, j: c * f.fn(x, j), max_order=f.max_order,
                          support=f.support, name=f"({c}*{f.name})")


def f_translate(f: SmoothFunction, shift: float) -> SmoothFunction:
    support = None
    if f.support is not None:
        support = CompactSet(f.support.lo + shift, f.support.hi + shift)
    return SmoothFunction(lambda x, j: f.fn(x - shift, j), max_order=f.max_order,
                          support=support, name=f"{f.name}(.-{shift})")


def f_dilate(f: SmoothFunction, s: float) -> SmoothFunction:
    """x -> f(x/s) for s > 0."""
    if s <= 0:
        raise CatalogError("dilation factor must be positive")
    support = None
    if f.support is not None:
        support = CompactSet(f.support.lo * s, f.support.hi * s)
    return SmoothFunction(lambda x, j: f.fn(x / s, j) * s ** (-j),
                          max_order=f.max_order, support=support,
                          name=f"{f.name}(./{s})")


def catalog(name: str, *params) -> SmoothFunction:
    """Build a named catalog function.

    Names: poly, sin, cos, exp, bump, plateau, sum, product, translate,
    dilate.
    """
    if name == "poly":
        if not params:
            raise CatalogError("poly needs at least one coefficient")
        return _make_poly(params)
    if name == "sin":
        return SmoothFunction(lambda x, j: np.sin(x + j * np.pi / 2),
                              max_order=64, name="sin", spec=("sin",))
    if name == "cos":
        return SmoothFunction(lambda x, j: np.cos(x + j * np.pi / 2),
                              max_order=64, name="cos", spec=("cos",))
    if name == "exp":
        return SmoothFunction(lambda x, j: np.exp(x),
                              max_order=64, name="exp", spec=("exp",))
    if name == "bump":
        (r,) = params
        if r <= 0:
            raise CatalogError("bump radius must be positive")
        return SmoothFunction(lambda x, j: _bump_eval(x, j, r),
                              support=CompactSet(-r, r), name=f"bump({r})",
                              spec=("bump", float(r)))
    if name == "plateau":
        a, b, delta = params
        if delta <= 0:
            raise CatalogError("plateau margin must be positive")
        if a > b:
            raise CatalogError("plateau needs a <= b")
        return SmoothFunction(lambda x, j: _plateau_eval(x, j, a, b, delta),
                              support=CompactSet(a - delta, b + delta),
                              name=f"plateau({a},{b},{delta})",
                              spec=("plateau", float(a), float(b), float(delta)))
    if name == "sum":
        f, g = params
        return f_sum(f, g)
    if name == "product":
        f, g = params
        return f_product(f, g)
    if name == "translate":
        f, shift = params
        return f_translate(f, shift)
    if name == "dilate":
        f, s = params
        return f_dilate(f, s)
    raise CatalogError(f"unknown catalog entry {name!r}")
