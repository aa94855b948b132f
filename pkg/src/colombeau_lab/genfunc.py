"""Compositional representatives R(phi, x), embeddings and derivatives.

A representative is a finite tree over Embed / Sigma / Const / Sum /
Product / Scale / PartialD / HatD nodes.  Evaluation takes a kernel
argument: either Conv(phi), realizing the convolution kernel
phi(y - x), or a General accessor for arbitrary smoothing kernels (the
special-algebra cutoff kernels use this).  Differentials with respect to
the kernel slot are computed symbolically over the tree, so polarization
identities can be checked at machine precision.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .distribution import Distribution, pair_translated, regular
from .errors import AdmissibilityError, ColombeauLabError
from .funcspace import FULL_LINE, Domain, SmoothFunction, catalog
from .mollifier import Mollifier, admissible
from .quadrature import DEFAULT_QUAD, QuadConfig, composite_gauss

_GENERAL_PANELS = 64


# ---------------------------------------------------------------------------
# Kernel arguments.

@dataclass(frozen=True)
class Conv:
    """Convolution kernel phi(y - x) built from a mollifier."""

    phi: Mollifier


@dataclass(frozen=True)
class General:
    """Arbitrary smoothing kernel with derivative accessor.

    ``accessor(x, y, alpha, beta)`` returns the mixed derivative
    d_x^alpha d_y^beta of the kernel; ``y_support(x)`` returns (lo, hi)
    arrays bounding the kernel's y-support for each x.
    """

    accessor: Callable
    y_support: Callable


@dataclass(frozen=True)
class DirSum:
    """Formal sum of kernel arguments, used as a polarization direction."""

    parts: Tuple


# ---------------------------------------------------------------------------
# Tree nodes.

@dataclass(frozen=True)
class Embed:
    u: Distribution


@dataclass(frozen=True)
class Sigma:
    f: SmoothFunction


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Sum:
    left: object
    right: object


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class Scale:
    factor: float
    child: object


@dataclass(frozen=True)
class PartialD:
    child: object


@dataclass(frozen=True)
class HatD:
    field: SmoothFunction
    child: object


@dataclass(frozen=True)
class Representative:
    node: object
    domain: Domain = FULL_LINE


def iota(u: Distribution, domain: Domain = FULL_LINE) -> Representative:
    return Representative(Embed(u), domain)


def sigma(f: SmoothFunction, domain: Domain = FULL_LINE) -> Representative:
    return Representative(Sigma(f), domain)


def rep_sum(a: Representative, b: Representative) -> Representative:
    return Representative(Sum(a.node, b.node), a.domain)


def rep_product(a: Representative, b: Representative) -> Representative:
    return Representative(Product(a.node, b.node), a.domain)


def rep_scale(c: float, a: Representative) -> Representative:
    return Representative(Scale(c, a.node), a.domain)


def rep_diff(a: Representative) -> Representative:
    return Representative(PartialD(a.node), a.domain)


def rep_hatD(X: SmoothFunction, a: Representative) -> Representative:
    return Representative(HatD(X, a.node), a.domain)


# ---------------------------------------------------------------------------
# Kernel-slot pairing: <u, arg(x)> with j x-derivatives on the kernel slot.

def _pair_general(u: Distribution, arg: General, x: np.ndarray, j: int,
                  cfg: QuadConfig) -> np.ndarray:
    if u.variant == "delta":
        return arg.accessor(x, np.full_like(x, u.x0), j, 0)
    if u.variant == "ddelta":
        return (-1.0) ** u.k * arg.accessor(x, np.full_like(x, u.x0), j, u.k)
    lo, hi = arg.y_support(x)
    lo, hi = np.broadcast_to(lo, x.shape).astype(float), \
        np.broadcast_to(hi, x.shape).astype(float)
    if u.variant == "heaviside":
        lo = np.maximum(lo, u.x0)
    hi = np.maximum(hi, lo)
    tbase, wbase = composite_gauss(-1.0, 1.0, _GENERAL_PANELS)
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    ys = mid[:, None] + half[:, None] * tbase[None, :]
    kv = arg.accessor(x[:, None], ys, j, 0)
    if u.variant == "regular":
        kv = kv * u.density(ys, 0)
    return (half[:, None] * wbase[None, :] * kv).sum(axis=1)


def _pair_arg(u: Distribution, arg, x: np.ndarray, j: int,
              cfg: QuadConfig) -> np.ndarray:
    if isinstance(arg, Conv):
        return np.atleast_1d(pair_translated(u, arg.phi, x, j, cfg))
    if isinstance(arg, General):
        return _pair_general(u, arg, x, j, cfg)
    if isinstance(arg, DirSum):
        out = np.zeros_like(x)
        for part in arg.parts:
            out = out + _pair_arg(u, part, x, j, cfg)
        return out
    raise ColombeauLabError(f"unknown kernel argument {type(arg).__name__}")


# ---------------------------------------------------------------------------
# Evaluation.

def _check_admissible(arg, x: np.ndarray, domain: Domain):
    if isinstance(arg, Conv):
        r = arg.phi.radius
        if float(np.min(x)) - r <= domain.lo or float(np.max(x)) + r >= domain.hi:
            raise AdmissibilityError(
                f"mollifier support of radius {r} leaves the domain "
                f"({domain.lo}, {domain.hi}); shrink the evaluation set or eps")


def _direction_kernel(X: SmoothFunction, phi: Mollifier) -> General:
    """Kernel of the Lie-transport direction used by the hatD derivative.

    For the convolution kernel phi(y - x) the direction is
    -X(x) phi'(y - x) + X(y) phi'(y - x) + X'(y) phi(y - x),
    combining the x-transport of the kernel with the density-weight
    correction (divergence term).
    """

    def accessor(x, y, alpha, beta):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = y - x
        out = np.zeros(np.broadcast(x, y).shape)
        for i in range(alpha + 1):
            out -= (math.comb(alpha, i) * X(x, i) * (-1.0) ** (alpha - i)
                    * phi.func(t, 1 + alpha - i + beta))
        for i in range(beta + 1):
            out += (math.comb(beta, i) * (-1.0) ** alpha
                    * (X(y, i) * phi.func(t, 1 + alpha + beta - i)
                       + X(y, i + 1) * phi.func(t, alpha + beta - i)))
        return out

    return General(accessor=accessor,
                   y_support=lambda x: (x - phi.radius, x + phi.radius))


def _eval(node, arg, x: np.ndarray, j: int, domain: Domain,
          cfg: QuadConfig) -> np.ndarray:
    if isinstance(node, Embed):
        return _pair_arg(node.u, arg, x, j, cfg)
    if isinstance(node, Sigma):
        return np.atleast_1d(node.f(x, j))
    if isinstance(node, Const):
        return np.full_like(x, node.value) if j == 0 else np.zeros_like(x)
    if isinstance(node, Sum):
        return (_eval(node.left, arg, x, j, domain, cfg)
                + _eval(node.right, arg, x, j, domain, cfg))
    if isinstance(node, Scale):
        return node.factor * _eval(node.child, arg, x, j, domain, cfg)
    if isinstance(node, Product):
        out = np.zeros_like(x)
        for i in range(j + 1):
            out = out + (math.comb(j, i)
                         * _eval(node.left, arg, x, i, domain, cfg)
                         * _eval(node.right, arg, x, j - i, domain, cfg))
        return out
    if isinstance(node, PartialD):
        return _eval(node.child, arg, x, j + 1, domain, cfg)
    if isinstance(node, HatD):
        if j > 0:
            raise ColombeauLabError(
                "x-derivatives of hatD nodes are not supported")
        return _hatD(node.field, node.child, arg, x, domain, cfg)
    raise ColombeauLabError(f"unknown node {type(node).__name__}")


def eval(R: Representative, arg, x, order: int = 0,
         cfg: QuadConfig = DEFAULT_QUAD):
    """order-th x-derivative of R evaluated on the kernel argument."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    _check_admissible(arg, xa, R.domain)
    out = _eval(R.node, arg, xa, order, R.domain, cfg)
    return float(out[0]) if scalar else out


def _hatD(X: SmoothFunction, node, arg, x: np.ndarray, domain: Domain,
          cfg: QuadConfig) -> np.ndarray:
    if not isinstance(arg, Conv):
        raise ColombeauLabError("hatD evaluation needs a convolution kernel")
    direction = _direction_kernel(X, arg.phi)
    transport = X(x, 0) * _eval(node, arg, x, 1, domain, cfg)
    return -_diff(node, arg, (direction,), x, 0, domain, cfg) + transport


def hatD_eval(R: Representative, X: SmoothFunction, arg, x,
              cfg: QuadConfig = DEFAULT_QUAD):
    """Lie-type derivative along the field X at kernel argument arg."""
    return eval(Representative(HatD(X, R.node), R.domain), arg, x, 0, cfg)


# ---------------------------------------------------------------------------
# Symbolic differentials in the kernel slot.

def _diff(node, phi0, dirs: tuple, x: np.ndarray, j: int, domain: Domain,
          cfg: QuadConfig) -> np.ndarray:
    k = len(dirs)
    if k == 0:
        return _eval(node, phi0, x, j, domain, cfg)
    if isinstance(node, Embed):
        # pairing is linear in the kernel: d^1 pairs the direction,
        # higher differentials vanish
        if k == 1:
            return _pair_arg(node.u, dirs[0], x, j, cfg)
        return np.zeros_like(x)
    if isinstance(node, (Sigma, Const)):
        return np.zeros_like(x)
    if isinstance(node, Sum):
        return (_diff(node.left, phi0, dirs, x, j, domain, cfg)
                + _diff(node.right, phi0, dirs, x, j, domain, cfg))
    if isinstance(node, Scale):
        return node.factor * _diff(node.child, phi0, dirs, x, j, domain, cfg)
    if isinstance(node, PartialD):
        return _diff(node.child, phi0, dirs, x, j + 1, domain, cfg)
    if isinstance(node, Product):
        out = np.zeros_like(x)
        idx = range(k)
        for size in range(k + 1):
            for left_set in itertools.combinations(idx, size):
                left_dirs = tuple(dirs[i] for i in left_set)
                right_dirs = tuple(dirs[i] for i in idx
                                   if i not in left_set)
                for i in range(j + 1):
                    out = out + (math.comb(j, i)
                                 * _diff(node.left, phi0, left_dirs, x, i,
                                         domain, cfg)
                                 * _diff(node.right, phi0, right_dirs, x,
                                         j - i, domain, cfg))
        return out
    raise ColombeauLabError(
        f"differential unsupported for node {type(node).__name__}")


def differential(R: Representative, phi0, dirs, x, order: int = 0,
                 cfg: QuadConfig = DEFAULT_QUAD):
    """k-th multilinear differential of R at phi0 in the given directions."""
    if not dirs:
        raise ColombeauLabError("differential needs at least one direction")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = _diff(R.node, phi0, tuple(dirs), xa, order, R.domain, cfg)
    return float(out[0]) if scalar else out


def polarize(R: Representative, phi0, dirs, x, order: int = 0,
             cfg: QuadConfig = DEFAULT_QUAD):
    """Reconstruct the mixed differential from diagonal evaluations.

    (1/k!) sum over nonempty subsets J of directions of
    (-1)^{k-|J|} d^k R(phi0)(S_J, ..., S_J) with S_J the subset sum.
    """
    k = len(dirs)
    if not 1 <= k <= 4:
        raise ColombeauLabError("polarization supports 1 <= k <= 4")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    total = np.zeros_like(xa)
    for a in range(1, k + 1):
        for J in itertools.combinations(range(k), a):
            S = DirSum(tuple(dirs[i] for i in J))
            diag = _diff(R.node, phi0, (S,) * k, xa, order, R.domain, cfg)
            total = total + (-1.0) ** (k - a) * diag
    total = total / math.factorial(k)
    return float(total[0]) if scalar else total


def to_convolution(R: Representative):
    """Curried evaluator (phi, x) -> R(Conv(phi), x)."""
    return lambda phi, x: eval(R, Conv(phi), x, 0)


# ---------------------------------------------------------------------------
# JSON serialization of trees (node-tagged).

def _dist_to_dict(u: Distribution) -> dict:
    d = {"variant": u.variant, "x0": u.x0}
    if u.variant == "ddelta":
        d["k"] = u.k
    if u.variant == "regular":
        if u.density.spec is None:
            raise ColombeauLabError("density has no catalog spec; cannot serialize")
        d["density"] = list(u.density.spec)
    return d


def _dist_from_dict(d: dict) -> Distribution:
    if d["variant"] == "regular":
        spec = d["density"]
        return regular(catalog(spec[0], *spec[1:]))
    return Distribution(d["variant"], x0=d.get("x0", 0.0), k=d.get("k", 0))


def node_to_dict(node) -> dict:
    if isinstance(node, Embed):
        return {"op": "iota", "u": _dist_to_dict(node.u)}
    if isinstance(node, Sigma):
        if node.f.spec is None:
            raise ColombeauLabError("function has no catalog spec; cannot serialize")
        return {"op": "sigma", "f": list(node.f.spec)}
    if isinstance(node, Const):
        return {"op": "const", "value": node.value}
    if isinstance(node, Sum):
        return {"op": "sum", "left": node_to_dict(node.left),
                "right": node_to_dict(node.right)}
    if isinstance(node, Product):
        return {"op": "product", "left": node_to_dict(node.left),
                "right": node_to_dict(node.right)}
    if isinstance(node, Scale):
        return {"op": "scale", "factor": node.factor,
                "child": node_to_dict(node.child)}
    if isinstance(node, PartialD):
        return {"op": "D", "child": node_to_dict(node.child)}
    if isinstance(node, HatD):
        if node.field.spec is None:
            raise ColombeauLabError("field has no catalog spec; cannot serialize")
        return {"op": "hatD", "field": list(node.field.spec),
                "child": node_to_dict(node.child)}
    raise ColombeauLabError(f"unknown node {type(node).__name__}")


def node_from_dict(d: dict):
    op = d["op"]
    if op == "iota":
        return Embed(_dist_from_dict(d["u"]))
    if op == "sigma":
        spec = d["f"]
        return Sigma(catalog(spec[0], *spec[1:]))
    if op == "const":
        return Const(float(d["value"]))
    if op == "sum":
        return Sum(node_from_dict(d["left"]), node_from_dict(d["right"]))
    if op == "product":
        return Product(node_from_dict(d["left"]), node_from_dict(d["right"]))
    if op == "scale":
        return Scale(float(d["factor"]), node_from_dict(d["child"]))
    if op == "D":
        return PartialD(node_from_dict(d["child"]))
    if op == "hatD":
        spec = d["field"]
        return HatD(catalog(spec[0], *spec[1:]), node_from_dict(d["child"]))
    raise ColombeauLabError(f"unknown node tag {op!r}")
