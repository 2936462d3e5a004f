"""Symmetry classifiers and first integrals.

Three checks on a point vector field: Lie point symmetry of an equation
(prolonged action vanishes on solutions), variational symmetry of a
Lagrangian (the invariance expression S(v) vanishes identically), and
divergence symmetry of an equation (Q*Delta is a total derivative, tested
through the Euler operator).  First integrals pair an expression F with a
characteristic Q so that D_x F = Q*Delta exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .exprcore import JET, canon, max_jet_order, zero_test
from .jetcalc import (
    DiffEq,
    Lagrangian,
    VectorField,
    characteristic,
    dx_fixed_jets,
    euler,
    inverse_total_derivative,
    prolong,
    substitute_solved,
    total_derivative,
)
from .maxsym import SourceContext


class NotADivergenceSymmetry(ValueError):
    """first_integral called with a field that fails the divergence check."""


class NotFirstIntegral(ValueError):
    """D_x F is not a differential-function multiple of the equation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SymmetryVerdict:
    """Outcome of a symmetry check; witness is the residual (0 when holds)."""

    kind: str
    holds: bool
    witness: sp.Expr


@dataclass(frozen=True)
class FirstIntegral:
    """Expression F with characteristic Q such that D_x F = Q*Delta."""

    expr: sp.Expr
    q: sp.Expr
    equation: DiffEq
    witness: sp.Expr


def _reduce(e, ctx: SourceContext | None):
    return ctx.reduce(e) if ctx is not None else canon(e)


def _rates(ctx: SourceContext | None):
    return ctx.rates if ctx is not None else None


def invariance_expression(v: VectorField, L: Lagrangian, ctx: SourceContext | None = None) -> sp.Expr:
    """S(v) = pr v (L) + L * D_x xi, the variational invariance residual."""
    rates = _rates(ctx)
    phis = prolong(v, L.order, rates)
    out = v.xi * dx_fixed_jets(L.density, rates) + L.density * total_derivative(v.xi, rates=rates)
    for k in range(L.order + 1):
        out += phis[k] * sp.diff(L.density, JET[k])
    return out


def lie_symmetry_check(v: VectorField, eq: DiffEq, ctx: SourceContext | None = None) -> SymmetryVerdict:
    """Prolonged action of v on Delta, reduced on the solution manifold."""
    rates = _rates(ctx)
    phis = prolong(v, eq.order, rates)
    action = v.xi * dx_fixed_jets(eq.delta, rates)
    for k in range(eq.order + 1):
        action += phis[k] * sp.diff(eq.delta, JET[k])
    residual = _reduce(substitute_solved(action, eq, rates), ctx)
    return SymmetryVerdict("lie", zero_test(residual), residual)


def variational_check(v: VectorField, L: Lagrangian, ctx: SourceContext | None = None) -> SymmetryVerdict:
    """Off-shell test S(v) = 0 identically in all jet variables."""
    residual = _reduce(invariance_expression(v, L, ctx), ctx)
    return SymmetryVerdict("variational", zero_test(residual), residual)


def divergence_check(v: VectorField, eq: DiffEq, ctx: SourceContext | None = None) -> SymmetryVerdict:
    """Test E(Q*Delta) = 0, with Q the characteristic of v."""
    product = sp.expand(characteristic(v) * eq.delta)
    residual = _reduce(euler(product, rates=_rates(ctx)), ctx)
    return SymmetryVerdict("divergence", zero_test(residual), residual)


def first_integral(v: VectorField, eq: DiffEq, ctx: SourceContext | None = None) -> FirstIntegral:
    """Noether-style first integral of a divergence symmetry.

    F is the inverse total derivative of Q*Delta, computed with the
    context's reduced derivative table (Q*Delta is exact in the quotient
    algebra, not as a free differential polynomial).  The defining
    identity D_x F - Q*Delta = 0 is verified exactly and stored.
    """
    verdict = divergence_check(v, eq, ctx)
    if not verdict.holds:
        raise NotADivergenceSymmetry(f"E(Q*Delta) = {verdict.witness} != 0")
    rates = ctx.deriv_rates() if ctx is not None else None
    q = characteristic(v)
    product = _reduce(sp.expand(q * eq.delta), ctx)
    F = inverse_total_derivative(sp.expand(product), rates=rates, check_exact=False)
    witness = _reduce(total_derivative(F, rates=rates) - q * eq.delta, ctx)
    if not zero_test(witness):
        raise NotFirstIntegral("inverse derivative failed verification", witness)
    return FirstIntegral(F, q, eq, witness)


def verify_first_integral(F, eq: DiffEq, ctx: SourceContext | None = None) -> sp.Expr:
    """The multiplier mu with D_x F = mu * Delta, if one exists.

    Works by polynomial division against the solved form: the top jet
    cofactor of D_x F must reproduce D_x F modulo the monic equation.
    """
    rates = ctx.deriv_rates() if ctx is not None else None
    eq = eq.monic()
    r = total_derivative(sp.sympify(F), rates=rates)
    while max_jet_order(r) > eq.order:
        m = max_jet_order(r)
        consequence = eq.solved_rhs()
        for _ in range(m - eq.order):
            consequence = total_derivative(consequence, rates=rates)
        consequence = consequence.subs(JET[eq.order], eq.solved_rhs())
        r = sp.together(r.subs(JET[m], consequence))
    mu = sp.cancel(sp.diff(sp.together(r), JET[eq.order]))
    if sp.diff(mu, JET[eq.order]) != 0:
        raise NotFirstIntegral("D_x F is nonlinear in the top derivative", r)
    remainder = _reduce(r - mu * eq.delta, ctx)
    if not zero_test(remainder):
        raise NotFirstIntegral("nonzero remainder after division", remainder)
    return canon(mu)


def divergence_relation_check(
    L0: Lagrangian, P, theta, v: VectorField, ctx: SourceContext | None = None
) -> SymmetryVerdict:
    """Linearity of S across equivalent Lagrangians L = theta*L0 + D_x P."""
    rates = _rates(ctx)
    dP = total_derivative(sp.sympify(P), rates=rates)
    order = max(L0.order, max_jet_order(dP), 0)
    L = Lagrangian(sp.expand(theta * L0.density + dP), order)
    L0w = Lagrangian(L0.density, order)
    dPw = Lagrangian(dP, order)
    residual = _reduce(
        invariance_expression(v, L, ctx)
        - theta * invariance_expression(v, L0w, ctx)
        - invariance_expression(v, dPw, ctx),
        ctx,
    )
    return SymmetryVerdict("variational", zero_test(residual), residual)
