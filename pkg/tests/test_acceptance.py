"""Acceptance gate: the ten headline guarantees of the laboratory.

Each test class is one criterion.  Oracles are independent of the code
under test wherever a criterion calls for one (Simpson moments, direct
multilinear expansion, closed-form pairings).
"""

import json
import math
import random

import numpy as np
import pytest

from colombeau_lab import asymptotics as asym
from colombeau_lab import cli
from colombeau_lab import distribution as dist
from colombeau_lab import exprdsl as dsl
from colombeau_lab import genfunc as gf
from colombeau_lab import specialmap as sm
from colombeau_lab.errors import DslSyntaxError
from colombeau_lab.funcspace import CompactSet, Domain, catalog
from colombeau_lab.mollifier import build_moment_mollifier, scale, starred
from colombeau_lab.seminorm import (BoundedFamily, defect_norm, eval_pospoly,
                                    grid_sup, kernel_norm, monomial, norm_Km)

K = CompactSet(-1.0, 1.0)
K_HALF = CompactSet(-0.5, 0.5)
L = CompactSet(-2.0, 2.0)
B_SIN_CUBE = BoundedFamily((catalog("sin"), catalog("poly", 0.0, 0.0, 0.0, 1.0)))


def simpson_moment(phi, j, n=1_000_001):
    """Independent 10^6-node Simpson oracle for the j-th moment."""
    xs = np.linspace(-phi.radius, phi.radius, n)
    ys = xs ** j * phi(xs, 0)
    h = xs[1] - xs[0]
    return h / 3 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum())


class TestCriterion1MomentConstruction:
    @pytest.mark.parametrize("q", [0, 2, 4, 6, 8])
    def test_residuals_below_1e8(self, q):
        phi = build_moment_mollifier(q, 1.0)
        for j in range(q + 1):
            target = 1.0 if j == 0 else 0.0
            assert abs(simpson_moment(phi, j) - target) <= 1e-8, (q, j)


class TestCriterion2KernelNormScaling:
    def test_slope_is_minus_one_minus_c_minus_l(self):
        phi = build_moment_mollifier(2, 1.0)
        eps_list = [2.0 ** -k for k in range(4, 15)]
        norms = {}
        for e in eps_list:
            kern = starred(scale(phi, e))
            for c in range(3):
                for l in range(3):
                    norms.setdefault((c, l), []).append(
                        kernel_norm(kern, K_HALF, c, L, l).value)
        for (c, l), vals in norms.items():
            rep = asym.fit_rate(list(zip(eps_list, vals)))
            assert rep.slope == pytest.approx(-(1 + c + l), abs=0.05), (c, l)


class TestCriterion3DefectDecay:
    @pytest.mark.parametrize("q", [2, 4])
    @pytest.mark.parametrize("c", [0, 1])
    def test_slope_is_q_plus_one(self, q, c):
        phi = build_moment_mollifier(q, 1.0)
        grid = asym.EpsGrid(2.0, 4, 14)
        rep = asym.defect_sweep(phi, K_HALF, c, B_SIN_CUBE, grid)
        assert rep.slope == pytest.approx(q + 1, abs=0.1), (q, c, rep.slope)


class TestCriterion4DominationInequalities:
    def pairing_norm(self, phi, Kc, c, B):
        """sup over x in K, j <= c, f in B of |<f, d^j phi(.-x)>|."""
        best = 0.0
        for f in B.members:
            u = dist.regular(f)
            for j in range(c + 1):
                est = grid_sup(
                    lambda xs, u=u, j=j: np.abs(
                        dist.pair_translated(u, phi, xs, j)),
                    Kc.lo, Kc.hi, 801)
                best = max(best, est.value)
        return best

    def test_hundred_random_mollifiers(self):
        rng = random.Random(42)
        for trial in range(100):
            q = rng.randint(0, 4)
            r = rng.uniform(0.2, 1.0)
            c = rng.randint(0, 2)
            phi = scale(build_moment_mollifier(q, r),
                        rng.choice([1.0, 0.5, 0.25]))
            kern = starred(phi)
            Lbig = CompactSet(K_HALF.lo - phi.radius, K_HALF.hi + phi.radius)
            sup_L0 = max(norm_Km(f, Lbig, 0).value
                         for f in B_SIN_CUBE.members)
            sup_Kc = max(norm_Km(f, K_HALF, c).value
                         for f in B_SIN_CUBE.members)
            y0 = kernel_norm(kern, K_HALF, c, Lbig, 0).value
            lam1 = (monomial(0, (1,), (0,), Lbig.length * sup_L0)
                    + monomial(0, (0,), (0,), sup_Kc))
            lam2 = monomial(0, (1,), (0,), Lbig.length * sup_L0)
            lhs1 = defect_norm(kern, K_HALF, c, B_SIN_CUBE).value
            rhs1 = eval_pospoly(lam1, (y0,), (0.0,))
            assert lhs1 <= rhs1 * (1 + 1e-6), (trial, q, r, c)
            lhs2 = self.pairing_norm(phi, K_HALF, c, B_SIN_CUBE)
            rhs2 = eval_pospoly(lam2, (y0,), (0.0,))
            assert lhs2 <= rhs2 * (1 + 1e-6), (trial, q, r, c)


class TestCriterion5EmbeddingSuite:
    def setup_method(self):
        self.phi = build_moment_mollifier(2, 1.0, symmetric=True)
        self.grid = asym.EpsGrid(2.0, 4, 14)

    def test_delta_slope_minus_one(self):
        R = dsl.parse_expr("iota(delta)")
        rep = asym.fit_rate([(e, est.value) for e, est in
                             asym.sweep(R, self.phi, K, 0, self.grid)])
        assert rep.slope == pytest.approx(-1.0, abs=0.05)

    def test_delta_square_slope_and_witness(self):
        R = dsl.parse_expr("iota(delta)*iota(delta)")
        measured = asym.sweep(R, self.phi, K, 0, self.grid)
        rep = asym.fit_rate([(e, est.value) for e, est in measured])
        assert rep.slope == pytest.approx(-2.0, abs=0.05)
        verdict = asym.moderateness_probe(R, self.phi, K, 0, self.grid)
        assert verdict.status == "moderate-witnessed"
        c, d, lam = verdict.witness
        assert (c, d) == (0, 2)
        # sample-wise domination of the sweep by the witness polynomial
        from colombeau_lab.seminorm import norm_c
        for e, est in measured:
            y = norm_c(scale(self.phi, e), c).value
            assert est.value <= eval_pospoly(lam, (y,), (0.0,)) * (1 + 1e-9)

    def test_sigma_slope_zero(self):
        R = dsl.parse_expr("sigma(sin)")
        rep = asym.fit_rate([(e, est.value) for e, est in
                             asym.sweep(R, self.phi, K, 0, self.grid)])
        assert rep.slope == pytest.approx(0.0, abs=0.05)

    def test_embedding_difference_negligible_at_both_orders(self):
        R = dsl.parse_expr("iota(reg(sin)) - sigma(sin)")
        verdict = asym.negligibility_falsifier(
            R, K, 0, c=0, l=0, D_max=3, grid=asym.EpsGrid(2.0, 1, 10))
        assert verdict.status == "consistent-with-negligible"
        # D=1 sweeps with moment class q=2, D=3 with q=4
        for D, q in ((1, 2), (3, 4)):
            rep = verdict.evidence[D - 1]
            assert rep.slope >= q + 1 - 0.1, (D, rep.slope)


class TestCriterion6NonNegligibility:
    def test_heaviside_square_refuted_to_degree_three(self):
        R = dsl.parse_expr("iota(H)*iota(H) - iota(H)")
        verdict = asym.negligibility_falsifier(R, K, 0, c=0, l=0, D_max=3)
        assert verdict.status == "refuted-to-degree(3)"
        assert verdict.soundness_ok
        for _, _, persistent in verdict.refutations:
            assert 0.2 <= persistent <= 0.3

    def test_delta_refuted(self):
        R = dsl.parse_expr("iota(delta)")
        verdict = asym.negligibility_falsifier(R, K, 0, c=0, l=0, D_max=3)
        assert verdict.status.startswith("refuted-to-degree")
        assert verdict.soundness_ok


class TestCriterion7Polarization:
    def random_tree(self, rng, depth=0):
        dists = [dist.delta(0.0), dist.delta(0.2), dist.heaviside(),
                 dist.delta_derivative(1), dist.regular(catalog("sin")),
                 dist.regular(catalog("cos"))]
        if depth >= 2 or (depth > 0 and rng.random() < 0.5):
            return gf.Embed(rng.choice(dists))
        return gf.Product(self.random_tree(rng, depth + 1),
                          self.random_tree(rng, depth + 1))

    def test_fifty_random_product_trees(self):
        rng = random.Random(7)
        phi0 = gf.Conv(scale(build_moment_mollifier(2, 1.0), 2.0 ** -3))
        xs = np.array([-0.3, 0.0, 0.25])
        for trial in range(50):
            R = gf.Representative(self.random_tree(rng))
            k = rng.randint(1, 3)
            dirs = [gf.Conv(scale(build_moment_mollifier(
                rng.randint(0, 2), rng.uniform(0.3, 1.0)), 2.0 ** -3))
                for _ in range(k)]
            direct = gf.differential(R, phi0, dirs, xs)
            recon = gf.polarize(R, phi0, dirs, xs)
            ref = max(1.0, float(np.max(np.abs(direct))))
            assert np.max(np.abs(direct - recon)) <= 1e-10 * ref, (trial, k)


class TestCriterion8Commutation:
    def setup_method(self):
        self.arg = gf.Conv(scale(
            build_moment_mollifier(2, 1.0, symmetric=True), 2.0 ** -4))
        self.xs = np.linspace(K.lo, K.hi, 801)

    def sup_diff(self, Ra, Rb):
        a = gf.eval(Ra, self.arg, self.xs, 0)
        b = gf.eval(Rb, self.arg, self.xs, 0)
        return float(np.max(np.abs(a - b)))

    def test_derivative_commutes_for_regular_sin(self):
        # d/dx <sin, phi(.-x)> = <cos, phi(.-x)> by parts, exactly
        Ra = gf.rep_diff(gf.iota(dist.regular(catalog("sin"))))
        Rb = gf.iota(dist.regular(catalog("cos")))
        assert self.sup_diff(Ra, Rb) <= 1e-8

    def test_derivative_commutes_for_heaviside(self):
        Ra = gf.rep_diff(gf.iota(dist.heaviside()))
        Rb = gf.iota(dist.delta())
        assert self.sup_diff(Ra, Rb) <= 1e-8

    def test_hatD_with_unit_field(self):
        one = catalog("poly", 1.0)
        Ra = gf.Representative(gf.HatD(one,
                                       gf.Embed(dist.regular(catalog("sin")))))
        Rb = gf.iota(dist.regular(catalog("cos")))
        assert self.sup_diff(Ra, Rb) <= 1e-8


class TestCriterion9SpecialMapping:
    def test_kernel_norm_slopes(self):
        cfg = sm.make_config(build_moment_mollifier(4, 1.0, symmetric=True),
                             Domain(-4.0, 4.0))
        Lloc = CompactSet(-1.0, 1.0)
        eps_list = [2.0 ** -k for k in range(1, 11)]
        for c in (0, 1):
            for l in (0, 1):
                vals = [sm.psi_kernel_norm(cfg, e, K_HALF, c, Lloc, l).value
                        for e in eps_list]
                rep = asym.fit_rate(list(zip(eps_list, vals)))
                assert rep.slope == pytest.approx(-(1 + c + l),
                                                  abs=0.1), (c, l)

    def test_embedding_difference_decay_with_q4(self):
        cfg = sm.make_config(build_moment_mollifier(4, 1.0, symmetric=True),
                             Domain(-4.0, 4.0))
        R = dsl.parse_expr("iota(reg(sin)) - sigma(sin)")
        xs = np.linspace(K_HALF.lo, K_HALF.hi, 401)
        samples = []
        for e in [2.0 ** -k for k in range(1, 11)]:
            vals = np.abs(sm.special_rep(R, cfg, e, xs))
            samples.append((e, float(np.max(vals))))
        rep = asym.fit_rate(samples)
        assert rep.slope >= 4 + 1 - 0.15


class TestCriterion10ParserAndDemo:
    def test_500_tree_round_trip(self):
        from test_exprdsl import random_ast
        rng = random.Random(1234)
        for _ in range(500):
            ast = random_ast(rng)
            assert dsl.parse(dsl.format(ast)) == ast

    def test_precedence(self):
        assert dsl.parse("1 + 2*3") == dsl.Add(
            dsl.Lit(1.0), dsl.Mul(dsl.Lit(2.0), dsl.Lit(3.0)))
        assert dsl.parse("(1 + 2)*3") == dsl.Mul(
            dsl.Add(dsl.Lit(1.0), dsl.Lit(2.0)), dsl.Lit(3.0))
        assert dsl.parse("1 - 2 + 3") == dsl.Add(
            dsl.Sub(dsl.Lit(1.0), dsl.Lit(2.0)), dsl.Lit(3.0))
        assert dsl.parse("D(sigma(sin))*2") == dsl.Mul(
            dsl.Deriv(dsl.SigmaF(("sin",))), dsl.Lit(2.0))

    ERROR_CORPUS = [
        ("", 1), ("   ", 4), ("+", 1), ("* sigma(sin)", 1),
        ("iota", 5), ("iota(", 6), ("iota()", 6), ("iota(delta", 11),
        ("iota(delta))", 12), ("iota(pv)", 6), ("sigma", 6),
        ("sigma(tan)", 7), ("sigma(sin", 10), ("sigma(sin) +", 13),
        ("sigma(sin) @", 12), ("D sigma(sin)", 3), ("hatD(sigma(sin))", 5),
        ("hatD[sin(sigma(sin))", 9), ("iota(ddelta(1.5))", 13),
        ("sigma(poly(1,))", 14),
    ]

    @pytest.mark.parametrize("text,pos", ERROR_CORPUS)
    def test_error_position_corpus(self, text, pos):
        with pytest.raises(DslSyntaxError) as err:
            dsl.parse(text)
        assert err.value.position == pos, (text, err.value.position)

    def test_demo_exits_zero_and_reproduces_verdicts(self, capsys):
        code = cli.main(["demo"])
        out = capsys.readouterr().out
        assert code == 0
        body = json.loads(out)
        result = body["result"]
        # criterion 5 verdicts
        assert result["delta"]["sweep_slope"] == pytest.approx(-1.0, abs=0.05)
        assert result["delta"]["moderateness"] == "moderate-witnessed"
        assert result["embedding"]["negligibility"]["status"] == \
            "consistent-with-negligible"
        # criterion 6 verdicts
        heavi = result["heaviside"]["negligibility"]
        assert heavi["status"] == "refuted-to-degree(3)"
        for entry in heavi["refutations"]:
            assert 0.2 <= entry["persistent"] <= 0.3
        assert result["delta"]["negligibility"]["status"].startswith(
            "refuted-to-degree")
