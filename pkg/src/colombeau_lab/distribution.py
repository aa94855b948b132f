"""Catalog of distributions with exact or quadrature pairings.

Variants: Delta(x0), DeltaDerivative(x0, k), Heaviside(x0) and
Regular(density).  Pairings against translated kernels use analytic
shortcuts wherever the variant admits one; only the Regular and
Heaviside cases touch quadrature.

Convention note: the translated pairing <u, phi(. - x)> equals the
convolution (u * phi_check)(x) with phi_check(y) = phi(-y).  The weak
limit of <u, phi_eps(. - x)> as eps -> 0 recovers u only up to this
reflection; for even mollifiers the two conventions coincide, and the
tests exercise even kernels to sidestep the ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ColombeauLabError
from .funcspace import SmoothFunction
from .mollifier import Mollifier
from .quadrature import (DEFAULT_QUAD, QuadConfig, composite_gauss,
                         gauss_rule, integrate)

# bump-profile integrands converge slowly near the support boundary;
# 64 panels reach machine accuracy even against kernel derivatives
CONV_PANELS = 64


@dataclass(frozen=True)
class Distribution:
    variant: str  # 'delta' | 'ddelta' | 'heaviside' | 'regular'
    x0: float = 0.0
    k: int = 0
    density: Optional[SmoothFunction] = None

    def __post_init__(self):
        if self.variant not in ("delta", "ddelta", "heaviside", "regular"):
            raise ColombeauLabError(f"unknown distribution variant {self.variant!r}")
        if self.variant == "regular" and self.density is None:
            raise ColombeauLabError("regular distribution needs a density")

    @property
    def order(self) -> int:
        return self.k if self.variant == "ddelta" else 0


def delta(x0: float = 0.0) -> Distribution:
    return Distribution("delta", x0=x0)


def delta_derivative(k: int, x0: float = 0.0) -> Distribution:
    if k < 1:
        raise ColombeauLabError("delta derivative order must be >= 1")
    return Distribution("ddelta", x0=x0, k=k)


def heaviside(x0: float = 0.0) -> Distribution:
    return Distribution("heaviside", x0=x0)


def regular(density: SmoothFunction) -> Distribution:
    return Distribution("regular", density=density)


def pair(u: Distribution, phi: SmoothFunction,
         cfg: QuadConfig = DEFAULT_QUAD) -> float:
    """<u, phi> for a compactly supported test function phi."""
    if phi.support is None:
        raise ColombeauLabError("pair needs a compactly supported test function")
    lo, hi = phi.support.lo, phi.support.hi
    if u.variant == "delta":
        return float(phi(u.x0, 0))
    if u.variant == "ddelta":
        return (-1.0) ** u.k * float(phi(u.x0, u.k))
    if u.variant == "heaviside":
        if u.x0 >= hi:
            return 0.0
        return integrate(phi, max(u.x0, lo), hi, cfg)
    return integrate(lambda y: u.density(y, 0) * phi(y, 0), lo, hi, cfg)


def _tail_integrals(func: SmoothFunction, s, r: float) -> np.ndarray:
    """integral of func over [s_i, r] for each s_i, by shared segments."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    sc = np.clip(s, -r, r)
    edges = np.unique(np.concatenate([sc, np.linspace(-r, r, 33)]))
    a, b = edges[:-1], edges[1:]
    t, w = gauss_rule(12)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    nodes = mid[:, None] + half[:, None] * t[None, :]
    vals = func(nodes.ravel(), 0).reshape(nodes.shape)
    seg = (half[:, None] * w[None, :] * vals).sum(axis=1)
    # suffix[i] = integral from edges[i] to r
    suffix = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    idx = np.searchsorted(edges, sc)
    return suffix[idx]


def _regular_conv(density: SmoothFunction, phi: Mollifier, x, order: int):
    """(-1)^j integral of u(x + t) phi^(j)(t) dt, vectorized over x."""
    r = phi.radius
    t, w = composite_gauss(-r, r, CONV_PANELS)
    pj = phi(t, order)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    uv = density(x[:, None] + t[None, :], 0)
    return (-1.0) ** order * uv @ (w * pj)


def pair_translated(u: Distribution, phi: Mollifier, x, order: int = 0,
                    cfg: QuadConfig = DEFAULT_QUAD):
    """j-th x-derivative of <u, phi(. - x)>; vectorized over x."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    s = u.x0 - xa
    if u.variant == "delta":
        out = (-1.0) ** order * phi(s, order)
    elif u.variant == "ddelta":
        out = (-1.0) ** (u.k + order) * phi(s, u.k + order)
    elif u.variant == "heaviside":
        if order == 0:
            out = _tail_integrals(phi.func, s, phi.radius)
        else:
            out = (-1.0) ** (order - 1) * phi(s, order - 1)
    else:
        out = _regular_conv(u.density, phi, xa, order)
    out = np.atleast_1d(out)
    return float(out[0]) if scalar else out
