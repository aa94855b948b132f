"""Rate fitting, moderateness witnesses and the negligibility falsifier."""

import math

import numpy as np
import pytest

from colombeau_lab import asymptotics as asym
from colombeau_lab import distribution as dist
from colombeau_lab import genfunc as gf
from colombeau_lab.errors import (AdmissibilityError,
                                  InsufficientSamplesError)
from colombeau_lab.funcspace import CompactSet, Domain, catalog
from colombeau_lab.mollifier import build_moment_mollifier
from colombeau_lab.seminorm import BoundedFamily, eval_pospoly

K = CompactSet(-0.5, 0.5)


class TestEpsGrid:
    def test_eps_values(self):
        g = asym.EpsGrid(2.0, 1, 3)
        assert g.eps == (0.5, 0.25, 0.125)

    def test_validation(self):
        with pytest.raises(ValueError):
            asym.EpsGrid(base=0.5)
        with pytest.raises(ValueError):
            asym.EpsGrid(k_min=5, k_max=4)
        with pytest.raises(ValueError):
            asym.EpsGrid(k_min=-1)


class TestFitRate:
    def test_exact_power_law(self):
        eps = [2.0 ** -k for k in range(2, 10)]
        samples = [(e, 3.0 * e ** 2.5) for e in eps]
        rep = asym.fit_rate(samples)
        assert rep.slope == pytest.approx(2.5, abs=1e-12)
        assert rep.intercept == pytest.approx(math.log(3.0), abs=1e-10)
        assert rep.ok and rep.r_squared > 0.999

    def test_floor_excludes_noise_samples(self):
        eps = [2.0 ** -k for k in range(2, 12)]
        samples = [(e, max(e ** 3, 5e-14)) for e in eps]
        rep = asym.fit_rate(samples)
        assert all(samples[i][1] > asym.FIT_FLOOR for i in rep.window)
        assert rep.slope == pytest.approx(3.0, abs=1e-10)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamplesError):
            asym.fit_rate([(0.5, 1e-20), (0.25, 1e-20), (0.125, 1e-20),
                           (0.0625, 1.0), (0.03125, 1.0)])

    def test_explicit_window(self):
        eps = [2.0 ** -k for k in range(1, 9)]
        samples = [(e, e) for e in eps]
        rep = asym.fit_rate(samples, window=range(4))
        assert rep.window == (0, 1, 2, 3)

    def test_noisy_fit_flagged(self):
        rng = np.random.default_rng(5)
        eps = [2.0 ** -k for k in range(1, 11)]
        samples = [(e, math.exp(rng.uniform(-3, 3))) for e in eps]
        rep = asym.fit_rate(samples)
        assert not rep.ok


class TestSweep:
    def test_delta_sweep_slope_minus_one(self):
        phi = build_moment_mollifier(2, 1.0, symmetric=True)
        R = gf.iota(dist.delta())
        measured = asym.sweep(R, phi, K, 0, asym.EpsGrid(2.0, 3, 9))
        rep = asym.fit_rate([(e, est.value) for e, est in measured])
        assert rep.slope == pytest.approx(-1.0, abs=0.02)

    def test_domain_clash_raises(self):
        phi = build_moment_mollifier(0, 1.0)
        R = gf.iota(dist.delta(), Domain(-0.6, 0.6))
        with pytest.raises(AdmissibilityError):
            asym.sweep(R, phi, K, 0, asym.EpsGrid(2.0, 0, 5))

    def test_thread_count_from_env(self, monkeypatch):
        monkeypatch.setenv("COLOMBEAU_LAB_THREADS", "3")
        assert asym.worker_count() == 3
        monkeypatch.setenv("COLOMBEAU_LAB_THREADS", "junk")
        assert asym.worker_count() == 1

    def test_threaded_sweep_matches_serial(self, monkeypatch):
        phi = build_moment_mollifier(2, 1.0, symmetric=True)
        R = gf.iota(dist.delta())
        grid = asym.EpsGrid(2.0, 3, 7)
        serial = asym.sweep(R, phi, K, 0, grid)
        monkeypatch.setenv("COLOMBEAU_LAB_THREADS", "4")
        threaded = asym.sweep(R, phi, K, 0, grid)
        assert [(e, est.value) for e, est in serial] == \
            [(e, est.value) for e, est in threaded]


class TestModerateness:
    def setup_method(self):
        self.phi = build_moment_mollifier(2, 1.0, symmetric=True)
        self.grid = asym.EpsGrid(2.0, 3, 9)

    def test_delta_witnessed_at_first_order(self):
        R = gf.iota(dist.delta())
        v = asym.moderateness_probe(R, self.phi, K, 0, self.grid)
        assert v.status == "moderate-witnessed"
        c, d, lam = v.witness
        assert (c, d) == (0, 1)
        # the witness polynomial actually dominates a fresh sample
        from colombeau_lab.mollifier import scale
        from colombeau_lab.seminorm import norm_c
        e = 2.0 ** -5
        y = norm_c(scale(self.phi, e), 0).value
        value = asym.sweep(R, self.phi, K, 0,
                           asym.EpsGrid(2.0, 5, 5))[0][1].value
        assert value <= eval_pospoly(lam, (y,), (0.0,)) * (1 + 1e-9)

    def test_smooth_field_witnessed_degree_zero(self):
        R = gf.sigma(catalog("sin"))
        v = asym.moderateness_probe(R, self.phi, K, 0, self.grid)
        assert v.status == "moderate-witnessed"
        assert v.witness[:2] == (0, 0)

    def test_delta_square_needs_degree_two(self):
        R = gf.rep_product(gf.iota(dist.delta()), gf.iota(dist.delta()))
        v = asym.moderateness_probe(R, self.phi, K, 0, self.grid)
        assert v.status == "moderate-witnessed"
        assert v.witness[:2] == (0, 2)


class TestDefectSweep:
    def test_symmetric_q2_gains_an_order(self):
        # even ansatz kills the q+1 moment too, so the defect decays at q+2
        phi = build_moment_mollifier(2, 1.0, symmetric=True)
        B = BoundedFamily((catalog("sin"),))
        rep = asym.defect_sweep(phi, K, 0, B, asym.EpsGrid(2.0, 3, 8))
        assert rep.slope == pytest.approx(4.0, abs=0.1)


class TestFalsifier:
    def test_heaviside_square_minus_heaviside_refuted(self):
        R = gf.rep_sum(
            gf.rep_product(gf.iota(dist.heaviside()),
                           gf.iota(dist.heaviside())),
            gf.rep_scale(-1.0, gf.iota(dist.heaviside())))
        v = asym.negligibility_falsifier(R, K, 0, c=0, l=0, D_max=2,
                                         grid=asym.EpsGrid(2.0, 4, 10))
        assert v.status == "refuted-to-degree(2)"
        assert v.soundness_ok
        for D, q, persistent in v.refutations:
            assert q == D + 1
            # even mollifier: sup |F^2 - F| = 1/4 at the jump
            assert persistent == pytest.approx(0.25, abs=0.01)

    def test_embedding_difference_consistent(self):
        R = gf.rep_sum(gf.iota(dist.regular(catalog("sin"))),
                       gf.rep_scale(-1.0, gf.sigma(catalog("sin"))))
        v = asym.negligibility_falsifier(R, K, 0, c=0, l=0, D_max=2,
                                         grid=asym.EpsGrid(2.0, 1, 10))
        assert v.status == "consistent-with-negligible"
        assert not v.refutations
        # decay at least q+1 for the mollifier class used at each degree
        for D, rep in zip((1, 2), v.evidence):
            q = D + 1
            assert rep.slope >= q + 1 - 0.1, (D, rep.slope)

    def test_budget_on_degree(self):
        R = gf.iota(dist.delta())
        with pytest.raises(ValueError):
            asym.negligibility_falsifier(R, K, 0, c=0, l=0, D_max=4)
