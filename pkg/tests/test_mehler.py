"""Mehler kernel, subordination quadratureices and the analytic bounds."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfp.errors import SingularInputError, ToleranceError
from gfp.mehler import (
    QuadratureSpec,
    kernel_K,
    kernel_batch,
    kernel_lower_bound,
    kernel_upper_bound,
    kernel_upper_bound_radial,
    mehler,
    semigroup_mass,
)

# ---------------------------------------------------------------------------
# Mehler kernel
# ---------------------------------------------------------------------------

def test_mehler_reference_value():
    # oracle: direct high-precision evaluation of the two-point formula,
    # N=1, t=1, x=1, y=-1 (frozen from a 30-digit computation)
    assert mehler(1.0, (1.0,), (-1.0,)) == pytest.approx(
        0.6009341138854598, rel=1e-13)


def test_mehler_long_time_forgets_the_pair():
    # M_t -> 1 as t -> infinity for every (x, y)
    assert mehler(50.0, (2.0, -1.0), (0.3, 0.7)) == pytest.approx(1.0,
                                                                 abs=1e-12)


def test_mehler_short_time_peaks_on_the_diagonal():
    on = mehler(0.01, (0.5,), (0.5,))
    off = mehler(0.01, (0.5,), (0.6,))
    assert on > off
    # on the diagonal the exponent collapses to x^2 e^{-t} / (1 + e^{-t})
    t, xsq = 0.01, 0.25
    expect = ((1 - math.exp(-2 * t)) ** -0.5
              * math.exp(xsq * math.exp(-t) / (1 + math.exp(-t))))
    assert on == pytest.approx(expect, rel=1e-12)


def test_mehler_symmetry():
    assert mehler(0.7, (1.2, -0.3), (0.4, 2.0)) == pytest.approx(
        mehler(0.7, (0.4, 2.0), (1.2, -0.3)), rel=1e-15)


def test_mehler_far_pair_small_time_no_cancellation():
    # near-coincident points far from the origin: the naive grouping of the
    # exponent loses ~30 digits here; the separated form must stay finite
    # and close to the Euclidean heat-kernel value
    t, x, y = 1e-4, 8.0, 8.0 + 1e-6
    val = mehler(t, (x,), (y,))
    # leading short-time asymptote: Euclidean heat kernel times the
    # e^{(|x|^2+|y|^2)/4} prefactor; corrections are O(t |x|^2) ~ 1%
    heat = (2 * t) ** -0.5 * math.exp(-(y - x) ** 2 / (4 * t))
    assert val == pytest.approx(heat * math.exp((x * x + y * y) / 4.0),
                                rel=0.02)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("x", [(0.3,), (-1.2,), (0.3, -0.7), (1.5, 1.5)])
def test_stochastic_completeness(t, x):
    # the semigroup preserves the Gaussian measure: int M_t(x, .) dgamma = 1
    assert semigroup_mass(t, x) == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# subordinated kernel
# ---------------------------------------------------------------------------

def test_kernel_reference_value():
    # oracle: 30-digit adaptive quadrature of int_0^inf M_t t^{-s/2-1} dt
    kv = kernel_K(0.5, (0.0,), (1.0,))
    assert kv.value == pytest.approx(6.3744757378536105, rel=1e-10)
    assert kv.error_bound < 1e-8 * kv.value


def test_kernel_symmetry():
    a = kernel_K(0.3, (0.5, -0.2), (1.0, 0.4))
    b = kernel_K(0.3, (1.0, 0.4), (0.5, -0.2))
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_kernel_singular_at_coincidence():
    with pytest.raises(SingularInputError):
        kernel_K(0.5, (1.0,), (1.0,))


@pytest.mark.parametrize("sigma", [-0.1, 0.0, 2.0, 2.5])
def test_kernel_sigma_domain(sigma):
    with pytest.raises(ValueError):
        kernel_K(sigma, (0.0,), (1.0,))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(tail_time=0.5)


def test_kernel_tight_tolerance_unreachable():
    with pytest.raises(ToleranceError) as info:
        kernel_K(0.5, (0.0,), (1.0,), spec=QuadratureSpec(rel_tol=1e-16))
    assert info.value.value is not None  # partial result still reported


@given(st.floats(min_value=0.05, max_value=0.95),
       st.floats(min_value=0.05, max_value=4.0),
       st.floats(min_value=-2.0, max_value=2.0))
@settings(max_examples=40, deadline=None)
def test_kernel_monotone_in_separation(sigma, r, a):
    near = kernel_K(sigma, (a,), (a + r,))
    far = kernel_K(sigma, (a,), (a + r + 0.5,))
    # radial decay holds along a fixed ray from x
    assert far.value < near.value * (1.0 + 1e-9)


# ---------------------------------------------------------------------------
# analytic bounds
# ---------------------------------------------------------------------------

def test_lower_bound_constant():
    # C_{N,s} = 2^{s+N/2} Gamma((s+N)/2) is exact in the r -> 0 limit
    sigma, r = 0.5, 1e-3
    lo = kernel_lower_bound(sigma, (0.0,), (r,))
    expect = 2.0 ** (sigma + 0.5) * math.gamma((sigma + 1) / 2) / r ** (1 + sigma)
    assert lo == pytest.approx(expect, rel=1e-14)
    kv = kernel_K(sigma, (0.0,), (r,))
    assert lo <= kv.value * (1.0 + 1e-9)
    assert kv.value == pytest.approx(lo, rel=5e-3)  # sharp near contact


def test_upper_bound_radial_is_decreasing():
    vals = [kernel_upper_bound_radial(0.5, r, 1) for r in (0.1, 0.5, 1.0, 3.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_bounds_bracket_the_kernel():
    rng = np.random.default_rng(7)
    for _ in range(25):
        sigma = float(rng.choice([0.1, 0.5, 0.9]))
        n = int(rng.choice([1, 2]))
        x = rng.normal(size=n)
        d = rng.normal(size=n)
        d /= np.linalg.norm(d)
        y = x + rng.uniform(0.05, 5.0) * d
        kv = kernel_K(sigma, x, y)
        assert kernel_lower_bound(sigma, x, y) <= kv.value + kv.error_bound
        assert kv.value - kv.error_bound <= kernel_upper_bound(sigma, x, y)


# ---------------------------------------------------------------------------
# vectorized engine
# ---------------------------------------------------------------------------

def test_batch_agrees_with_scalar():
    rng = np.random.default_rng(11)
    x = rng.normal(size=40)
    y = x + rng.uniform(0.01, 4.0, size=40) * rng.choice([-1, 1], size=40)
    sq = x * x + y * y
    vals, errs = kernel_batch(0.5, sq, x * y, (x - y) ** 2, 1)
    for i in range(40):
        ref = kernel_K(0.5, (x[i],), (y[i],))
        assert vals[i] == pytest.approx(ref.value, rel=1e-6)
        assert abs(vals[i] - ref.value) <= errs[i] + ref.error_bound \
            + 1e-6 * ref.value


def test_batch_rejects_coincident_pairs():
    with pytest.raises(SingularInputError):
        kernel_batch(0.5, np.array([2.0]), np.array([1.0]), np.array([0.0]), 1)
