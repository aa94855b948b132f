"""Numerical laboratory for Colombeau-type generalized functions (1D).

Core pieces: smooth-function catalog with analytic derivatives,
vanishing-moment mollifiers, distribution pairings, representative
trees with embeddings and symbolic kernel differentials, sup-type
seminorm families, eps-sweep rate analysis with moderateness witnesses
and a degree-bounded negligibility falsifier, the cutoff-kernel mapping
into the eps-indexed special algebra, a text DSL, an HTTP service and a
CLI client.
"""

from .errors import (AdmissibilityError, CatalogError, ColombeauLabError,
                     DslSyntaxError, EmptySetError, InsufficientSamplesError,
                     MomentConstructionError, OrderBudgetError,
                     QuadratureError)
from .funcspace import (CompactSet, Domain, FULL_LINE, SmoothFunction,
                        catalog, compactly_contained)
from .quadrature import QuadConfig, composite_gauss, convolve_at, integrate
from .mollifier import (ConvKernel, Mollifier, admissible,
                        build_moment_mollifier, moment, scale, starred)
from .distribution import (Distribution, delta, delta_derivative, heaviside,
                           pair, pair_translated, regular)
from .seminorm import (BoundedFamily, PosPoly, SupEstimate, defect_norm,
                       eval_pospoly, kernel_norm, monomial, norm_Km, norm_c)
from .genfunc import (Conv, General, Representative, differential, eval,
                      hatD_eval, iota, polarize, rep_diff, rep_hatD,
                      rep_product, rep_scale, rep_sum, sigma, to_convolution)
from .asymptotics import (EpsGrid, ModerationVerdict, NegligibilityVerdict,
                          RateReport, defect_sweep, fit_rate,
                          moderateness_probe, negligibility_falsifier, sweep)
from .specialmap import (SpecialConfig, K_eps, kappa, make_config,
                         psi_kernel, psi_kernel_norm, special_rep, theta)
from . import exprdsl

__version__ = "0.1.0"
