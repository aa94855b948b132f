"""Smooth-function catalog: values, analytic derivatives, combinators."""

import math

import numpy as np
import pytest

from colombeau_lab.errors import CatalogError, OrderBudgetError
from colombeau_lab.funcspace import (CompactSet, Domain, FULL_LINE,
                                     catalog, compactly_contained, f_dilate,
                                     f_product, f_scale, f_sum, f_translate)


def central_diff(f, x, order, h):
    if order == 0:
        return f(x, 0)
    return (central_diff(f, x + h, order - 1, h)
            - central_diff(f, x - h, order - 1, h)) / (2 * h)


class TestDomains:
    def test_full_line(self):
        assert FULL_LINE.lo == -math.inf and FULL_LINE.hi == math.inf

    def test_empty_domain_rejected(self):
        with pytest.raises(ValueError):
            Domain(1.0, 1.0)

    def test_compact_set_needs_finite_endpoints(self):
        with pytest.raises(ValueError):
            CompactSet(0.0, math.inf)

    def test_compact_containment_is_strict(self):
        assert compactly_contained(CompactSet(-1, 1), Domain(-2, 2))
        assert not compactly_contained(CompactSet(-2, 1), Domain(-2, 2))


class TestCatalog:
    def test_sin_derivative_cycle(self):
        f = catalog("sin")
        x = 0.7
        assert f(x, 0) == pytest.approx(math.sin(x), abs=1e-15)
        assert f(x, 1) == pytest.approx(math.cos(x), abs=1e-15)
        assert f(x, 2) == pytest.approx(-math.sin(x), abs=1e-15)
        assert f(x, 4) == pytest.approx(math.sin(x), abs=1e-15)

    def test_poly_derivatives_exact(self):
        f = catalog("poly", 1.0, -2.0, 0.0, 3.0)  # 1 - 2x + 3x^3
        assert f(2.0, 0) == pytest.approx(1 - 4 + 24)
        assert f(2.0, 1) == pytest.approx(-2 + 9 * 4)
        assert f(2.0, 3) == pytest.approx(18.0)
        assert f(2.0, 4) == 0.0

    def test_bump_peak_and_support(self):
        b = catalog("bump", 1.0)
        assert b(0.0, 0) == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert b(1.0, 0) == 0.0
        assert b(2.5, 0) == 0.0
        assert b.support.lo == -1.0 and b.support.hi == 1.0

    def test_bump_vanishes_with_all_derivatives_at_edge(self):
        b = catalog("bump", 1.0)
        for j in range(6):
            assert abs(b(0.999999, j)) < 1e-3

    def test_bump_derivative_matches_finite_differences(self):
        # away from the support edge, where difference quotients are stable
        b = catalog("bump", 1.0)
        xs = np.linspace(-0.85, 0.85, 9)
        for j in (1, 2):
            fd = central_diff(b, xs, j, 1e-6 if j == 1 else 1e-4)
            exact = b(xs, j)
            assert np.max(np.abs(fd - exact)) < 5e-6 * max(1.0, np.max(np.abs(exact)))

    def test_plateau_is_one_on_core_zero_outside(self):
        p = catalog("plateau", -1.0, 1.0, 0.5)
        assert p(0.0, 0) == 1.0
        assert p(-1.0, 0) == 1.0
        assert p(1.0, 0) == 1.0
        assert p(1.6, 0) == 0.0
        xs = np.linspace(-2.0, 2.0, 1001)
        vals = p(xs, 0)
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)

    def test_plateau_transition_derivative(self):
        p = catalog("plateau", -1.0, 1.0, 0.5)
        xs = np.linspace(1.05, 1.45, 7)
        fd = central_diff(p, xs, 1, 1e-6)
        assert np.max(np.abs(fd - p(xs, 1))) < 1e-5

    def test_unknown_entry(self):
        with pytest.raises(CatalogError):
            catalog("zeta")

    def test_order_budget_enforced(self):
        b = catalog("bump", 1.0)
        with pytest.raises(OrderBudgetError):
            b(0.0, b.max_order + 1)


class TestCombinators:
    def test_product_leibniz(self):
        f = f_product(catalog("sin"), catalog("cos"))
        # sin*cos = sin(2x)/2, second derivative -2 sin(2x)
        x = 0.4
        assert f(x, 0) == pytest.approx(0.5 * math.sin(2 * x), abs=1e-14)
        assert f(x, 2) == pytest.approx(-2.0 * math.sin(2 * x), abs=1e-13)

    def test_sum_and_scale(self):
        f = f_sum(f_scale(2.0, catalog("sin")), catalog("cos"))
        x = 1.1
        assert f(x, 1) == pytest.approx(2 * math.cos(x) - math.sin(x), abs=1e-14)

    def test_translate_shifts_support(self):
        g = f_translate(catalog("bump", 1.0), 3.0)
        assert g.support.lo == 2.0 and g.support.hi == 4.0
        assert g(3.0, 0) == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_dilate_chain_rule_factor(self):
        g = f_dilate(catalog("sin"), 2.0)  # sin(x/2)
        x = 0.9
        assert g(x, 1) == pytest.approx(0.5 * math.cos(x / 2), abs=1e-14)
        assert g(x, 2) == pytest.approx(-0.25 * math.sin(x / 2), abs=1e-14)

    def test_dilate_rejects_nonpositive(self):
        with pytest.raises(CatalogError):
            f_dilate(catalog("sin"), 0.0)

    def test_vectorized_evaluation_matches_scalar(self):
        f = f_product(catalog("bump", 1.0), catalog("poly", 0.0, 1.0))
        xs = np.linspace(-1.5, 1.5, 101)
        vec = f(xs, 1)
        scl = np.array([f(float(x), 1) for x in xs])
        assert np.array_equal(vec, scl)
