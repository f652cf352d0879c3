"""Covariance kernels with closed-form partial derivatives.

Each :class:`Kernel` carries, besides its evaluator, two pieces of metadata
the operator machinery relies on:

* ``partial(d1, d2)`` -- closed-form mixed partial evaluators, where
  available.  Consumers fall back to finite differences (or refuse) when a
  partial is missing.
* ``sample_smoothness`` -- the almost-sure differentiability order of sample
  paths drawn from the kernel.  This is the static proxy for whether paths
  lie in the domain of a differential operator: an operator of order ``q``
  is applicable only when ``q <= sample_smoothness``.  The underlying
  kernel-regularity => path-regularity implication is an analytic fact
  assumed per catalog entry, not something checked numerically.
"""

from __future__ import annotations

import math
from math import factorial

import numpy as np

from .errors import ParameterError

__all__ = ["Kernel", "se_kernel", "matern_kernel", "MATERN_ORDERS"]

# Total derivative budget (d1 + d2) kept in closed form for the squared
# exponential; enough for second-order operators on both arguments.
SE_PARTIAL_BUDGET = 6

MATERN_ORDERS = (0.5, 1.5, 2.5, 3.5)


class Kernel:
    """A symmetric positive-semidefinite bifunction on the index set.

    Parameters
    ----------
    evaluator : callable
        Vectorized ``k(x1, x2)`` accepting broadcastable arrays.
    partial_factory : callable, optional
        ``(d1, d2) -> evaluator or None`` for closed-form mixed partials.
    sample_smoothness : int or math.inf
        A.s. differentiability order of sample paths.
    symmetric : bool
        Whether ``k(x1, x2) == k(x2, x1)``; all catalog kernels are.
    """

    def __init__(self, evaluator, partial_factory=None, sample_smoothness=0,
                 symmetric=True, label="k"):
        self._evaluator = evaluator
        self._partial_factory = partial_factory
        self.sample_smoothness = sample_smoothness
        self.symmetric = symmetric
        self.label = label

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.asarray(self._evaluator(x1, x2), dtype=float)
        if x1.ndim == 0 and x2.ndim == 0:
            return float(out)
        return out

    def partial(self, d1: int, d2: int):
        """Closed-form evaluator of d^(d1+d2) k / dx1^d1 dx2^d2, or ``None``."""
        if d1 < 0 or d2 < 0:
            raise ParameterError("derivative orders must be non-negative")
        if d1 == d2 == 0:
            return self._evaluator
        if self._partial_factory is None:
            return None
        return self._partial_factory(d1, d2)

    def __repr__(self):
        return f"Kernel({self.label!r}, sample_smoothness={self.sample_smoothness})"


def _hermite_he(m, t):
    # Probabilists' Hermite polynomial He_m via the three-term recurrence.
    if m == 0:
        return np.ones_like(t)
    a = np.ones_like(t)
    b = np.array(t, dtype=float, copy=True)
    for k in range(1, m):
        a, b = b, t * b - k * a
    return b


def se_kernel(lengthscale: float, variance: float = 1.0) -> Kernel:
    """Squared-exponential kernel ``var * exp(-(x1-x2)^2 / (2 ell^2))``.

    Sample paths are smooth (infinitely differentiable), so any catalog
    operator applies.  Mixed partials are available in closed form for total
    order up to 6, via the Hermite-polynomial identity

        d^m/dr^m exp(-r^2/2) = (-1)^m He_m(r) exp(-r^2/2).
    """
    if not (lengthscale > 0 and variance > 0):
        raise ParameterError(
            f"lengthscale and variance must be positive, got {lengthscale}, {variance}"
        )
    ell, var = float(lengthscale), float(variance)

    def ev(x1, x2):
        t = (x1 - x2) / ell
        return var * np.exp(-0.5 * t * t)

    def partial_factory(d1, d2):
        m = d1 + d2
        if m > SE_PARTIAL_BUDGET:
            return None
        sign = (-1.0) ** d1

        def pev(x1, x2, _m=m, _sign=sign):
            t = (x1 - x2) / ell
            return _sign * var * ell ** (-_m) * _hermite_he(_m, t) * np.exp(-0.5 * t * t)

        return pev

    return Kernel(ev, partial_factory, sample_smoothness=math.inf,
                  label=f"se(ell={ell:g}, var={var:g})")


def _matern_radial_coeffs(p: int, a: float) -> np.ndarray:
    # Polynomial part of the half-integer Matern radial profile:
    # k(r) = P(r) exp(-a r) for r >= 0, coeffs[j] multiplying r^j.
    coeffs = np.zeros(p + 1)
    for i in range(p + 1):
        c = (factorial(p) / factorial(2 * p)
             * factorial(p + i) / (factorial(i) * factorial(p - i))
             * (2.0 * a) ** (p - i))
        coeffs[p - i] += c
    return coeffs


def _poly_exp_derivative(coeffs: np.ndarray, a: float) -> np.ndarray:
    # d/dr [P(r) e^{-a r}] = (P' - a P) e^{-a r}
    out = -a * coeffs
    out[:-1] += coeffs[1:] * np.arange(1, coeffs.size)
    return out


def matern_kernel(nu: float, lengthscale: float, variance: float = 1.0) -> Kernel:
    """Half-integer Matern kernel for nu in {1/2, 3/2, 5/2, 7/2}.

    Sample paths have exactly ``ceil(nu) - 1`` derivatives; closed-form mixed
    partials exist (and are supplied) up to total order twice that, which is
    the maximal differentiability of the kernel across the diagonal.  The
    half-integer family therefore exercises the operator-domain guard: e.g.
    the Ornstein-Uhlenbeck case nu = 1/2 admits no differential operator at
    all.

    Derivatives of the radial profile ``P(r) exp(-a r)`` are computed by
    symbolic polynomial differentiation of the r >= 0 branch and extended to
    r < 0 by even reflection.
    """
    if not any(abs(nu - v) < 1e-12 for v in MATERN_ORDERS):
        raise ParameterError(
            f"nu must be one of {MATERN_ORDERS} (half-integer catalog), got {nu}"
        )
    if not (lengthscale > 0 and variance > 0):
        raise ParameterError(
            f"lengthscale and variance must be positive, got {lengthscale}, {variance}"
        )
    ell, var = float(lengthscale), float(variance)
    p = int(round(nu - 0.5))
    a = math.sqrt(2.0 * nu) / ell
    base_coeffs = _matern_radial_coeffs(p, a)
    budget = 2 * p

    # m-th s-derivative of k(s) on s >= 0, as polynomial coefficients.
    deriv_coeffs = [base_coeffs]
    for _ in range(budget):
        deriv_coeffs.append(_poly_exp_derivative(deriv_coeffs[-1], a))

    def ev(x1, x2):
        r = np.abs(x1 - x2)
        return var * np.polyval(base_coeffs[::-1], r) * np.exp(-a * r)

    def partial_factory(d1, d2):
        m = d1 + d2
        if m > budget:
            return None
        coeffs = deriv_coeffs[m]
        sign = (-1.0) ** d2

        def pev(x1, x2, _coeffs=coeffs, _sign=sign, _m=m):
            s = np.asarray(x1 - x2, dtype=float)
            r = np.abs(s)
            val = var * np.polyval(_coeffs[::-1], r) * np.exp(-a * r)
            if _m % 2:
                val = val * np.where(s < 0, -1.0, 1.0)
            return _sign * val

        return pev

    return Kernel(ev, partial_factory, sample_smoothness=p,
                  label=f"matern(nu={nu:g}, ell={ell:g}, var={var:g})")
