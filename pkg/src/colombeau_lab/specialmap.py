"""Canonical mapping into the eps-indexed special algebra.

The mapping replaces the convolution kernel by the cutoff kernel
psi_eps(x)(y) = theta_eps(x - y) * kappa_eps(y), where theta_eps is the
scaled mollifier tapered by a plateau at radius 1/|ln eps| and kappa_eps
is a plateau equal to 1 on the exhausting compact K_eps.  For eps small
enough both cutoffs are inactive near any fixed compact set, and the
mapping agrees with the elementary convolution evaluation (for even
mollifiers, where theta(x - y) and theta(y - x) coincide).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ColombeauLabError, EmptySetError
from .funcspace import (CompactSet, Domain, SmoothFunction, catalog,
                        f_dilate, f_product)
from .genfunc import General, Representative, eval as rep_eval
from .mollifier import Mollifier, scale
from .quadrature import DEFAULT_QUAD, QuadConfig
from .seminorm import SupEstimate, STABILITY_RTOL


@dataclass(frozen=True)
class SpecialConfig:
    rho: Mollifier
    chi: SmoothFunction
    omega: Domain

    def __post_init__(self):
        if self.chi.support is None:
            raise ColombeauLabError("chi must have compact support")


def default_chi() -> SmoothFunction:
    """Plateau equal to 1 on [-1, 1] with support in [-2, 2]."""
    return catalog("plateau", -1.0, 1.0, 1.0)


def make_config(rho: Mollifier, omega: Domain) -> SpecialConfig:
    return SpecialConfig(rho=rho, chi=default_chi(), omega=omega)


def theta(cfg: SpecialConfig, eps: float) -> SmoothFunction:
    """y -> (1/eps) rho(y/eps) * chi(y |ln eps|)."""
    if not 0 < eps < 1:
        raise ColombeauLabError("theta needs 0 < eps < 1")
    lneps = abs(math.log(eps))
    rho_eps = scale(cfg.rho, eps).func
    chi_scaled = f_dilate(cfg.chi, 1.0 / lneps)
    return f_product(rho_eps, chi_scaled)


def K_eps(omega: Domain, eps: float) -> CompactSet:
    """The eps-exhaustion of omega clamped to the 1/eps ball."""
    if eps <= 0:
        raise ColombeauLabError("eps must be positive")
    lo = max(omega.lo + eps, -1.0 / eps)
    hi = min(omega.hi - eps, 1.0 / eps)
    if lo > hi:
        raise EmptySetError(f"exhaustion empty for eps={eps} on "
                            f"({omega.lo}, {omega.hi})")
    return CompactSet(lo, hi)


def kappa(omega: Domain, eps: float) -> SmoothFunction:
    """Plateau equal to 1 on K_eps, supported in its eps/2-enlargement."""
    Ke = K_eps(omega, eps)
    margin = eps / 2.0
    if Ke.lo - margin <= omega.lo or Ke.hi + margin >= omega.hi:
        raise ColombeauLabError("plateau margin does not fit inside the domain")
    return catalog("plateau", Ke.lo, Ke.hi, margin)


def psi_kernel(cfg: SpecialConfig, eps: float) -> General:
    """General kernel accessor for psi_eps(x)(y) = theta(x - y) kappa(y)."""
    th = theta(cfg, eps)
    ka = kappa(cfg.omega, eps)
    r = th.support.hi
    klo, khi = ka.support.lo, ka.support.hi

    def accessor(x, y, alpha, beta):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = x - y
        out = np.zeros(np.broadcast(x, y).shape)
        for i in range(beta + 1):
            out += (math.comb(beta, i) * (-1.0) ** i
                    * th(t, alpha + i) * ka(y, beta - i))
        return out

    def y_support(x):
        x = np.asarray(x, dtype=float)
        lo = np.maximum(x - r, klo)
        hi = np.minimum(x + r, khi)
        return lo, np.maximum(hi, lo)

    return General(accessor=accessor, y_support=y_support)


def special_rep(R: Representative, cfg: SpecialConfig, eps: float, x,
                order: int = 0, cfg_quad: QuadConfig = DEFAULT_QUAD):
    """Evaluate R on the cutoff kernel psi_eps."""
    return rep_eval(R, psi_kernel(cfg, eps), x, order, cfg_quad)


def psi_kernel_norm(cfg: SpecialConfig, eps: float, K: CompactSet, c: int,
                    L: CompactSet, l: int, nx: int = 101,
                    nt: int = 801) -> SupEstimate:
    """sup over x in K, y in L, alpha <= c, beta <= l of |d^a_x d^b_y psi|.

    Parametrized by (x, t = x - y): the kernel's y-support has width of
    order eps, so a uniform y-grid on L would miss it entirely; the
    t-grid covers the theta support exactly.
    """
    kern = psi_kernel(cfg, eps)
    th = theta(cfg, eps)
    r = th.support.hi
    xs = np.linspace(K.lo, K.hi, nx)
    ts = np.linspace(-r, r, nt)
    X = xs[:, None]
    Y = X - ts[None, :]
    mask = (Y >= L.lo) & (Y <= L.hi)
    best = 0.0
    half = 0.0
    for a in range(c + 1):
        for b in range(l + 1):
            vals = np.abs(kern.accessor(X, Y, a, b))
            vals = np.where(mask, vals, 0.0)
            best = max(best, float(vals.max()))
            half = max(half, float(vals[::2, ::2].max()))
    stable = (best - half) < STABILITY_RTOL * max(best, 1e-300)
    return SupEstimate(best, nx * nt, 1, stable)
