"""Linear differential operators and their action on means and kernels.

An operator is a finite sum ``sum_i a_i(x) d^i/dx^i`` with smooth coefficient
functions.  It acts on

* mean functions, giving ``x -> sum_i a_i(x) f^(i)(x)``;
* either argument of a kernel (``slot`` 1 or 2), giving a
  :class:`KernelBifunction` that tracks, per argument, how much of the
  kernel's derivative budget has been spent;
* both arguments, which is the covariance transport of the operator.

Applying to an argument requires ``operator.order <= sample_smoothness`` of
the kernel in that argument; requests beyond that budget are rejected with
:class:`DomainViolationError` regardless of whether finite differences could
produce a number.  Within the budget, evaluation uses closed-form partials
where the kernel has them and finite differences otherwise.

A standing analytic assumption, not checked numerically: the covariance
transport of a partially-defined operator is well posed when the operator is
closed with a densely defined adjoint.  Differential operators with smooth
coefficients on interval domains have this property (integration by parts
exhibits the adjoint), which is why the catalog restricts coefficients to
closed-form smooth functions.
"""

from __future__ import annotations

import math
from math import comb

import numpy as np

from .errors import DomainViolationError, EvaluationError, ParameterError
from .grids import Grid
from .kernels import Kernel
from .means import MeanFunction, constant_mean, mf_add, mf_mul, mf_scale, zero_mean
from .stencils import FDScheme, KERNEL_FALLBACK_SCHEME, fd_derivative, fd_mixed_partial

__all__ = [
    "LinearOperator",
    "identity",
    "derivative_operator",
    "compose",
    "add",
    "scale",
    "apply_to_function",
    "apply_arg",
    "apply_both",
    "commutator_residual",
    "ARG1",
    "ARG2",
]

# Argument slots of a bifunction; exactly two values.
ARG1, ARG2 = 1, 2

_METHODS = ("auto", "closed", "fd")


def _coerce_coefficient(c) -> MeanFunction:
    if isinstance(c, MeanFunction):
        return c
    if isinstance(c, (int, float)):
        return constant_mean(c)
    if isinstance(c, str):
        from .means import mean_from_expression

        return mean_from_expression(c)
    raise ParameterError(f"cannot interpret {c!r} as a coefficient function")


class LinearOperator:
    """``sum_i a_i(x) d^i/dx^i`` with closed-form coefficient functions.

    ``terms`` is an iterable of ``(order, coefficient)`` pairs; coefficients
    may be numbers, expression strings, or :class:`MeanFunction` instances.
    Duplicate orders are merged; exact-zero coefficients are dropped.
    """

    def __init__(self, terms, label=None):
        merged: dict[int, MeanFunction] = {}
        for order, coeff in terms:
            order = int(order)
            if order < 0:
                raise ParameterError(f"derivative order must be >= 0, got {order}")
            coeff = _coerce_coefficient(coeff)
            merged[order] = mf_add(merged[order], coeff) if order in merged else coeff
        merged = {o: c for o, c in merged.items() if not c.is_zero()}
        if not merged:
            merged = {0: zero_mean()}
        self.terms = tuple(sorted(merged.items()))
        self.order = max(o for o, _ in self.terms)
        self.label = label if label is not None else self._default_label()

    def _default_label(self):
        parts = []
        for order, coeff in self.terms:
            d = "1" if order == 0 else ("d/dx" if order == 1 else f"d^{order}/dx^{order}")
            if coeff.const_value == 1.0:
                parts.append(d)
            elif order == 0:
                parts.append(coeff.label)
            else:
                parts.append(f"{coeff.label}*{d}")
        return " + ".join(parts)

    def is_identity(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][0] == 0 and self.terms[0][1].const_value == 1.0

    def __add__(self, other):
        return add(self, other)

    def __rmul__(self, c):
        return scale(c, self)

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return f"LinearOperator({self.label!r}, order={self.order})"


def identity() -> LinearOperator:
    """The identity operator (single term, order 0, unit coefficient)."""
    return LinearOperator([(0, 1.0)], label="identity")


def derivative_operator(order: int = 1) -> LinearOperator:
    """Pure ``d^order/dx^order``."""
    if order < 0:
        raise ParameterError("order must be >= 0")
    if order == 0:
        return identity()
    label = "d/dx" if order == 1 else f"d^{order}/dx^{order}"
    return LinearOperator([(order, 1.0)], label=label)


def add(s: LinearOperator, t: LinearOperator) -> LinearOperator:
    """Term-wise sum of two operators."""
    return LinearOperator(list(s.terms) + list(t.terms), label=f"({s.label}) + ({t.label})")


def scale(c: float, t: LinearOperator) -> LinearOperator:
    """Scalar multiple of an operator, term-wise."""
    return LinearOperator(
        [(o, mf_scale(c, a)) for o, a in t.terms], label=f"{c:g}*({t.label})"
    )


def compose(s: LinearOperator, t: LinearOperator) -> LinearOperator:
    """Leibniz-expanded composition ``s o t`` of order ``s.order + t.order``.

    Coefficient derivatives needed by the expansion are taken from the
    coefficients' closed forms; if one is missing, the error surfaces when
    the composed operator is applied, not here.
    """
    new_terms = []
    for j, b in s.terms:
        for i, a in t.terms:
            for l in range(j + 1):
                coeff = mf_mul(b, mf_scale(comb(j, l), a.derivative(l, strict=False)))
                if not coeff.is_zero():
                    new_terms.append((i + j - l, coeff))
    return LinearOperator(new_terms, label=f"({s.label}) o ({t.label})")


def apply_to_function(op: LinearOperator, f: MeanFunction, *, method: str = "auto",
                      scheme: FDScheme | None = None) -> MeanFunction:
    """Apply the operator to a function: ``x -> sum_i a_i(x) f^(i)(x)``.

    Closed-form derivatives of ``f`` are used where present.  With
    ``method="auto"`` (or ``"fd"``) missing derivatives fall back to central
    finite differences of accuracy order 4; with ``method="closed"`` a
    missing derivative raises :class:`DomainViolationError` naming the
    deficit.  The result's smoothness is ``f.smoothness - op.order``.
    """
    if method not in _METHODS:
        raise ParameterError(f"method must be one of {_METHODS}")
    scheme = scheme or FDScheme()
    pieces = []
    for order, coeff in op.terms:
        if order == 0:
            pieces.append(mf_mul(coeff, f))
            continue
        ev = None if method == "fd" else f.derivative_evaluator(order)
        if ev is not None:
            pieces.append(mf_mul(coeff, f.derivative(order)))
        elif method == "closed":
            raise DomainViolationError(
                f"operator {op.label!r} needs derivative order {order} of "
                f"{f.label!r}, but only {f.smoothness} closed-form orders exist "
                f"and finite differences are disallowed"
            )
        else:
            def fd_ev(x, _d=order):
                x = np.asarray(x, dtype=float)
                if x.ndim == 0:
                    return fd_derivative(f, float(x), _d, scheme)
                return np.array([fd_derivative(f, xi, _d, scheme) for xi in x.ravel()]).reshape(x.shape)

            fd_mf = MeanFunction(fd_ev, smoothness=0, label=f"fd^{order}[{f.label}]")
            pieces.append(mf_mul(coeff, fd_mf))
    combined = pieces[0]
    for piece in pieces[1:]:
        combined = mf_add(combined, piece)
    budget = f.smoothness - op.order if f.smoothness != math.inf else math.inf
    # fresh wrapper: never mutate a MeanFunction the caller may still hold
    return MeanFunction(
        combined._evaluator,
        combined._deriv_factory,
        min(combined.smoothness, budget),
        label=f"{op.label}[{f.label}]",
        const_value=combined.const_value,
    )


class _BiTerm:
    """One summand ``c1(x1) * c2(x2) * d^(d1,d2) k`` of a transformed kernel."""

    __slots__ = ("c1", "c2", "d1", "d2")

    def __init__(self, c1, c2, d1, d2):
        self.c1, self.c2, self.d1, self.d2 = c1, c2, d1, d2


class KernelBifunction:
    """A kernel with operators applied to its arguments, kept in closed form.

    Stores a sum of terms ``c1(x1) c2(x2) * partial(d1, d2) k`` over a base
    kernel.  Evaluation resolves each term against the base kernel's
    closed-form partials, falling back to tensor-product finite differences
    per the construction method.  The spent derivative orders per argument
    (``applied1``, ``applied2``) determine the remaining budget available to
    further operator applications.
    """

    def __init__(self, base: Kernel, terms, method="auto", scheme=None, label=None):
        self.base = base
        self.terms = tuple(terms)
        self.method = method
        self.scheme = scheme or KERNEL_FALLBACK_SCHEME
        self.label = label or base.label
        self.applied1 = max((t.d1 for t in self.terms), default=0)
        self.applied2 = max((t.d2 for t in self.terms), default=0)
        self._evaluators = [self._resolve(t) for t in self.terms]

    @classmethod
    def wrap(cls, k) -> "KernelBifunction":
        if isinstance(k, KernelBifunction):
            return k
        if isinstance(k, Kernel):
            return cls(k, [_BiTerm(None, None, 0, 0)])
        raise ParameterError(f"expected a Kernel or KernelBifunction, got {type(k).__name__}")

    def remaining_budget(self, slot: int):
        applied = self.applied1 if slot == ARG1 else self.applied2
        s = self.base.sample_smoothness
        return s if s == math.inf else s - applied

    def _resolve(self, term: _BiTerm):
        closed = None if self.method == "fd" and (term.d1 or term.d2) else self.base.partial(term.d1, term.d2)
        if closed is not None:
            return closed
        if self.method == "closed":
            raise EvaluationError(
                f"kernel {self.base.label!r} has no closed-form partial "
                f"({term.d1}, {term.d2}) and finite differences are disallowed"
            )
        return fd_mixed_partial(self.base, term.d1, term.d2, self.scheme)

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        total = 0.0
        for term, ev in zip(self.terms, self._evaluators):
            val = np.asarray(ev(x1, x2), dtype=float)
            if term.c1 is not None:
                val = val * term.c1(x1)
            if term.c2 is not None:
                val = val * term.c2(x2)
            total = total + val
        total = np.asarray(total, dtype=float)
        if x1.ndim == 0 and x2.ndim == 0:
            return float(total)
        return total

    def partial(self, d1: int, d2: int):
        """Closed-form partial of the transformed bifunction, or ``None``.

        Exists when the needed deeper base-kernel partials and coefficient
        derivatives are all available in closed form; used to give image
        kernels their own partial metadata.
        """
        if d1 == 0 and d2 == 0:
            return self.__call__
        derived = _differentiate_terms(self.terms, d1, d2)
        if derived is None:
            return None
        resolved = []
        for term in derived:
            ev = self.base.partial(term.d1, term.d2)
            if ev is None:
                return None
            resolved.append((term, ev))

        def evaluate(x1, x2):
            x1 = np.asarray(x1, dtype=float)
            x2 = np.asarray(x2, dtype=float)
            total = 0.0
            for term, ev in resolved:
                val = np.asarray(ev(x1, x2), dtype=float)
                if term.c1 is not None:
                    val = val * term.c1(x1)
                if term.c2 is not None:
                    val = val * term.c2(x2)
                total = total + val
            return total

        return evaluate

    def __repr__(self):
        return (f"KernelBifunction({self.label!r}, terms={len(self.terms)}, "
                f"applied=({self.applied1}, {self.applied2}))")


def _coefficient_derivatives(c, e):
    # (shift l, derived coefficient or None-for-1) pairs of d^(e-l) c for the
    # Leibniz expansion; None result when a closed form is missing.
    if c is None:
        return [(e, None)]  # implicit constant 1: only the l == e term survives
    out = []
    for l in range(e + 1):
        if l == e:
            out.append((l, c))
            continue
        if c.derivative_evaluator(e - l) is None:
            return None
        d = c.derivative(e - l)
        if not d.is_zero():
            out.append((l, d))
    return out


def _differentiate_terms(terms, e1, e2):
    # Pure derivative d^(e1,e2) of a term list via the Leibniz rule; None when
    # a needed coefficient derivative lacks a closed form.
    out = []
    for t in terms:
        parts1 = _coefficient_derivatives(t.c1, e1)
        parts2 = _coefficient_derivatives(t.c2, e2)
        if parts1 is None or parts2 is None:
            return None
        for l1, c1 in parts1:
            for l2, c2 in parts2:
                cc1, cc2 = c1, c2
                factor = comb(e1, l1) * comb(e2, l2)
                if factor != 1:
                    if cc1 is not None:
                        cc1 = mf_scale(factor, cc1)
                    elif cc2 is not None:
                        cc2 = mf_scale(factor, cc2)
                    else:
                        cc1 = constant_mean(factor)
                out.append(_BiTerm(cc1, cc2, t.d1 + l1, t.d2 + l2))
    return out


def _check_slot(slot):
    if slot not in (ARG1, ARG2):
        raise ParameterError(f"slot must be {ARG1} (first argument) or {ARG2} (second), got {slot}")


def apply_arg(op: LinearOperator, slot: int, k, *, method: str = "auto",
              scheme: FDScheme | None = None) -> KernelBifunction:
    """Apply an operator to one argument of a kernel (or transformed kernel).

    The sample-smoothness budget of the chosen argument must cover
    ``op.order``; otherwise :class:`DomainViolationError` is raised before
    any numerics happen.  The result records the remaining per-argument
    budget, so repeated applications stay guarded.
    """
    _check_slot(slot)
    if method not in _METHODS:
        raise ParameterError(f"method must be one of {_METHODS}")
    bf = KernelBifunction.wrap(k)
    budget = bf.remaining_budget(slot)
    if op.order > budget:
        raise DomainViolationError(
            f"operator {op.label!r} of order {op.order} exceeds the remaining "
            f"sample-path smoothness budget {budget} of kernel {bf.base.label!r} "
            f"in argument {slot}; sample paths are (a.s.) not in the operator's domain"
        )
    new_terms = []
    for order, a in op.terms:
        for t in bf.terms:
            c_slot = t.c1 if slot == ARG1 else t.c2
            for l in range(order + 1):
                shift = order - l
                if c_slot is None:
                    if shift > 0:
                        continue  # derivative of the implicit constant 1
                    new_c = a
                else:
                    d_c = c_slot.derivative(shift, strict=False)
                    new_c = mf_mul(a, mf_scale(comb(order, l), d_c))
                    if new_c.is_zero():
                        continue
                if slot == ARG1:
                    new_terms.append(_BiTerm(new_c, t.c2, t.d1 + l, t.d2))
                else:
                    new_terms.append(_BiTerm(t.c1, new_c, t.d1, t.d2 + l))
    label = f"{op.label}_[arg{slot}] {bf.label}"
    return KernelBifunction(bf.base, new_terms, method=method,
                            scheme=scheme or bf.scheme, label=label)


def apply_both(op: LinearOperator, k, *, method: str = "auto",
               scheme: FDScheme | None = None) -> KernelBifunction:
    """Apply the operator to both kernel arguments (second argument first).

    This is the covariance transport of the operator; the choice of
    application order is immaterial, which :func:`commutator_residual`
    certifies numerically.
    """
    inner = apply_arg(op, ARG2, k, method=method, scheme=scheme)
    return apply_arg(op, ARG1, inner, method=method, scheme=scheme)


def commutator_residual(op: LinearOperator, k, grid: Grid, *, method: str = "auto",
                        scheme: FDScheme | None = None) -> float:
    """Max over the grid square of |arg1-then-arg2 minus arg2-then-arg1|."""
    a12 = apply_arg(op, ARG1, apply_arg(op, ARG2, k, method=method, scheme=scheme),
                    method=method, scheme=scheme)
    a21 = apply_arg(op, ARG2, apply_arg(op, ARG1, k, method=method, scheme=scheme),
                    method=method, scheme=scheme)
    x = grid.points
    v12 = a12(x[:, None], x[None, :])
    v21 = a21(x[:, None], x[None, :])
    return float(np.max(np.abs(v12 - v21)))
