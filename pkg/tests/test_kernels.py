"""Kernel catalog: values, symmetry, positive semidefiniteness, derivatives.

Derivative oracles are independent of the implementation: the squared
exponential is checked against sympy's symbolic differentiation, the Matern
family against high-precision finite differences (mpmath) of a separate
re-implementation of the textbook formula, and the zero-lag values against
scikit-learn's Matern kernel.
"""

import math
from math import factorial

import mpmath
import numpy as np
import pytest
import sympy as sp

from gpops.errors import NotPositiveDefiniteError, ParameterError
from gpops.grids import Grid
from gpops.kernels import MATERN_ORDERS, matern_kernel, se_kernel
from gpops.linalg import chol_psd, gram

RNG_SEED = 20240811


def catalog():
    return [
        se_kernel(1.0, 1.0),
        se_kernel(0.5, 2.0),
        matern_kernel(0.5, 1.0, 1.0),
        matern_kernel(1.5, 0.7, 1.3),
        matern_kernel(2.5, 1.0, 1.0),
        matern_kernel(3.5, 1.3, 0.8),
    ]


# ---------------------------------------------------------------- values

def test_se_values():
    k = se_kernel(1.0, 1.0)
    assert k(0.0, 0.0) == 1.0
    assert k(0.0, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert k.sample_smoothness == math.inf


def test_se_partial_11_at_origin_vs_stated_fd_oracle():
    # Oracle: central differences of the evaluator at h = 1e-4 with one
    # Richardson step, nested over the two arguments.
    k = se_kernel(1.0, 1.0)
    h = 1e-4

    def d_arg2(x1, x2, f):
        return (f(x1, x2 + h) - f(x1, x2 - h)) / (2 * h)

    def nested(x1, x2, step):
        def inner(a, b):
            return (k(a, b + step) - k(a, b - step)) / (2 * step)

        return (inner(x1 + step, x2) - inner(x1 - step, x2)) / (2 * step)

    coarse, fine = nested(0.0, 0.0, h), nested(0.0, 0.0, h / 2)
    oracle = (4 * fine - coarse) / 3  # Richardson for the O(h^2) scheme
    value = k.partial(1, 1)(np.float64(0.0), np.float64(0.0))
    assert value == pytest.approx(oracle, abs=1e-7)
    assert value == pytest.approx(1.0, abs=1e-12)  # 1/ell^2


def test_matern_values_and_smoothness():
    assert matern_kernel(0.5, 1.0, 1.0)(0.0, 0.0) == pytest.approx(1.0)
    for nu, smooth in zip(MATERN_ORDERS, (0, 1, 2, 3)):
        assert matern_kernel(nu, 1.0, 1.0).sample_smoothness == smooth


def test_matern52_at_unit_lag_three_routes():
    # Frozen from the closed form (1 + sqrt5 + 5/3) e^{-sqrt5}, cross-checked
    # against an independent direct evaluation and sklearn's Matern kernel.
    k = matern_kernel(2.5, 1.0, 1.0)
    direct = (1 + math.sqrt(5) + 5 / 3) * math.exp(-math.sqrt(5))
    assert k(0.0, 1.0) == pytest.approx(0.5239941088318203, rel=1e-15)
    assert k(0.0, 1.0) == pytest.approx(direct, rel=1e-14)
    sklearn = pytest.importorskip("sklearn.gaussian_process.kernels")
    ref = sklearn.Matern(length_scale=1.0, nu=2.5)(np.array([[0.0]]), np.array([[1.0]]))[0, 0]
    assert k(0.0, 1.0) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("bad_args", [(-1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_se_parameter_domain(bad_args):
    with pytest.raises(ParameterError):
        se_kernel(*bad_args)


def test_matern_parameter_domain():
    with pytest.raises(ParameterError):
        matern_kernel(2.0, 1.0, 1.0)  # not half-integer
    with pytest.raises(ParameterError):
        matern_kernel(1.5, -1.0, 1.0)


# ------------------------------------------------------------- invariants

def test_symmetry_thousand_random_pairs():
    rng = np.random.default_rng(RNG_SEED)
    x1, x2 = rng.uniform(-3, 3, size=(2, 1000))
    for k in catalog():
        assert np.max(np.abs(k(x1, x2) - k(x2, x1))) <= 1e-14


def test_partial_argument_exchange_symmetry():
    # For symmetric kernels, partial(d1,d2)(x1,x2) = partial(d2,d1)(x2,x1).
    rng = np.random.default_rng(RNG_SEED + 1)
    x1, x2 = rng.uniform(-3, 3, size=(2, 200))
    for k in catalog():
        budget = 6 if k.sample_smoothness == math.inf else 2 * k.sample_smoothness
        for d1 in range(4):
            for d2 in range(4):
                if d1 + d2 > budget:
                    continue
                pa, pb = k.partial(d1, d2), k.partial(d2, d1)
                assert np.max(np.abs(pa(x1, x2) - pb(x2, x1))) <= 1e-12


def test_psd_on_random_grids():
    rng = np.random.default_rng(RNG_SEED + 2)
    for k in catalog():
        for _ in range(20):
            n = int(rng.integers(2, 65))
            pts = np.sort(rng.uniform(-3, 3, size=n))
            pts = np.unique(pts)
            if pts.size < 2:
                continue
            _, delta = chol_psd(gram(k, Grid(pts)), max_jitter=1e-8)
            assert delta <= 1e-8


def test_gram_psd_on_dense_grid():
    # 256 distinct points stays factorizable up to jitter.
    g = Grid.uniform_on(-3, 3, 256)
    for k in catalog():
        chol_psd(gram(k, g), max_jitter=1e-8)


# --------------------------------------------- derivatives vs oracles

def test_se_partials_match_sympy_oracle():
    ell, var = 0.7, 1.8
    k = se_kernel(ell, var)
    x1s, x2s = sp.symbols("x1 x2")
    expr = var * sp.exp(-((x1s - x2s) ** 2) / (2 * ell**2))
    rng = np.random.default_rng(RNG_SEED + 3)
    pts = rng.uniform(-3, 3, size=(100, 2))
    for d1 in range(4):
        for d2 in range(4):
            if d1 + d2 > 6:
                assert k.partial(d1, d2) is None
                continue
            oracle = sp.lambdify((x1s, x2s), sp.diff(expr, x1s, d1, x2s, d2), "numpy")
            own = k.partial(d1, d2)
            err = max(abs(own(a, b) - oracle(a, b)) for a, b in pts)
            assert err <= 1e-5, (d1, d2, err)


def _matern_reference_mp(nu, ell, var):
    # Independent implementation of the half-integer Matern closed form,
    # evaluated in arbitrary precision for mpmath.diff.
    p = int(round(nu - 0.5))
    a = mpmath.sqrt(2 * mpmath.mpf(nu)) / ell

    def k(x1, x2):
        r = abs(x1 - x2)
        c0 = mpmath.mpf(factorial(p)) / factorial(2 * p)
        s = sum(
            mpmath.mpf(factorial(p + i)) / (factorial(i) * factorial(p - i)) * (2 * a * r) ** (p - i)
            for i in range(p + 1)
        )
        return var * c0 * s * mpmath.exp(-a * r)

    return k


@pytest.mark.parametrize("nu", [1.5, 2.5, 3.5])
def test_matern_partials_match_mpmath_fd_oracle(nu):
    ell, var = 1.3, 0.8
    k = matern_kernel(nu, ell, var)
    ref = _matern_reference_mp(nu, ell, var)
    p = k.sample_smoothness
    rng = np.random.default_rng(RNG_SEED + 4)
    pts = rng.uniform(-3, 3, size=(100, 2))
    # keep clear of the |x1 - x2| kink where derivatives beyond the budget jump
    pts = pts[np.abs(pts[:, 0] - pts[:, 1]) > 1e-2]
    with mpmath.workdps(40):
        for d1 in range(p + 1):
            for d2 in range(p + 1):
                if d1 + d2 > 2 * p:
                    continue
                own = k.partial(d1, d2)
                worst = 0.0
                for a, b in pts:
                    oracle = float(mpmath.diff(ref, (mpmath.mpf(a), mpmath.mpf(b)), (d1, d2)))
                    worst = max(worst, abs(own(a, b) - oracle))
                assert worst <= 1e-5, (d1, d2, worst)


def test_matern_partials_beyond_budget_absent():
    k = matern_kernel(1.5, 1.0, 1.0)
    assert k.partial(1, 1) is not None
    assert k.partial(2, 1) is None
    assert matern_kernel(0.5, 1.0, 1.0).partial(0, 1) is None


def test_indefinite_matrix_is_refused():
    with pytest.raises(NotPositiveDefiniteError):
        chol_psd(np.array([[1.0, 2.0], [2.0, 1.0]]), max_jitter=1e-6)
