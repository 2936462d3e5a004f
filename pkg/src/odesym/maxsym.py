"""Structures specific to ODEs of maximal symmetry.

Everything here is generated by a solution pair (u, v) of the second-order
source equation y'' + q(x) y = 0 with unit Wronskian: the rewrite context
that eliminates higher u/v-derivatives, the n+4 symmetry generators, the
linear equation of order n built by transforming the trivial equation, and
three Lagrangian families (canonical, transformed, natural).
"""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from . import transform as _transform
from .exprcore import (
    COEF_Q,
    JET,
    MAX_JET_ORDER,
    SOL_U,
    SOL_V,
    X,
    canon,
    max_jet_order,
    zero_test,
)
from .jetcalc import (
    DiffEq,
    Lagrangian,
    VectorField,
    dx_fixed_jets,
    total_derivative,
)


class BadOrder(ValueError):
    """Equation order outside the supported range."""


class OddOrder(ValueError):
    """A Lagrangian construction was requested for an odd-order equation."""


class EliminationFailed(RuntimeError):
    """Residual solution-symbol dependence survived the reduction."""

    def __init__(self, residue):
        super().__init__(f"u/v dependence not eliminated: {residue}")
        self.residue = residue


_LADDER = {SOL_U[0]: [SOL_U[0], SOL_U[1]], SOL_V[0]: [SOL_V[0], SOL_V[1]]}
_SECOND = {SOL_U[2]: -COEF_Q[0] * SOL_U[0], SOL_V[2]: -COEF_Q[0] * SOL_V[0]}


def _derivative_ladder(e) -> dict:
    """u^(k), v^(k) rewrites via u'' = -q u for the orders present in e.

    Reduced high-order entries grow combinatorially, so the ladder is
    extended lazily and cached.
    """
    table = {}
    free = e.free_symbols
    for fam, root in ((SOL_U, SOL_U[0]), (SOL_V, SOL_V[0])):
        need = max(
            (k for k in range(2, MAX_JET_ORDER + 1) if fam[k] in free), default=1
        )
        ladder = _LADDER[root]
        while len(ladder) <= need:
            ladder.append(sp.expand(total_derivative(ladder[-1]).subs(_SECOND)))
        table.update({fam[k]: ladder[k] for k in range(2, need + 1)})
    return table


class SourceContext:
    """Rewrite context of a source-equation solution pair.

    In symbolic mode u, v, q stay formal; reduction eliminates u/v
    derivatives of order >= 2 through the source equation and normalizes
    the Wronskian by eliminating v' via u*v' - u'*v = 1.  A concrete
    context instead substitutes explicit expressions for u, v and q, with
    ``rates`` supplying x-derivatives of any opaque atoms they use.
    """

    def __init__(self, u, v, q, rates=None, wronskian=sp.Integer(1)):
        self.u = sp.sympify(u)
        self.v = sp.sympify(v)
        self.q = sp.sympify(q)
        self.rates = dict(rates) if rates else {}
        self.wronskian = sp.sympify(wronskian)
        self.symbolic = self.u is SOL_U[0]

    @staticmethod
    def make_symbolic() -> "SourceContext":
        return SourceContext(SOL_U[0], SOL_V[0], COEF_Q[0])

    @staticmethod
    def from_solutions(u, v, rates=None) -> "SourceContext":
        """Context generated by a concrete solution pair.

        Validates that u and v solve the same source equation and that
        their Wronskian is a nonzero constant (not necessarily 1; every
        claim checked against a concrete context is invariant under
        constant rescaling of the pair).
        """
        u = sp.sympify(u)
        v = sp.sympify(v)
        d = lambda e: total_derivative(e, rates=rates)
        q = canon(-d(d(u)) / u)
        if not zero_test(canon(d(d(v)) + q * v)):
            raise ValueError("v does not solve the source equation of u")
        w = canon(u * d(v) - d(u) * v)
        if not zero_test(d(w)):
            raise ValueError("Wronskian is not constant")
        if zero_test(w):
            raise ValueError("solution pair is linearly dependent")
        return SourceContext(u, v, q, rates=rates, wronskian=w)

    @staticmethod
    def zero_q() -> "SourceContext":
        return SourceContext.from_solutions(sp.Integer(1), X)

    def dx(self, e, times: int = 1) -> sp.Expr:
        return total_derivative(e, times=times, rates=self.rates)

    def deriv_rates(self) -> dict:
        """Derivative table closed over the reduced coordinates (u, u', v, q).

        v differentiates through the Wronskian relation to (1 + u'v)/u and
        u'' collapses to -q*u, so repeated total derivatives never leave
        the reduced algebra (the v' rule is a fallback for inputs that were
        not pre-reduced).
        """
        if not self.symbolic:
            return self.rates
        return {
            SOL_V[0]: (1 + SOL_U[1] * SOL_V[0]) / SOL_U[0],
            SOL_U[1]: -COEF_Q[0] * SOL_U[0],
            SOL_V[1]: -COEF_Q[0] * SOL_V[0],
        }

    def q_derivative(self, j: int) -> sp.Expr:
        return COEF_Q[j] if self.symbolic else canon(self.dx(self.q, times=j)) if j else self.q

    def reduce(self, e) -> sp.Expr:
        """Normal form of an expression modulo the source-equation relations."""
        e = sp.sympify(e)
        if self.symbolic:
            e = e.xreplace(_derivative_ladder(e))
            e = e.subs(SOL_V[1], (1 + SOL_U[1] * SOL_V[0]) / SOL_U[0])
            return sp.cancel(sp.together(e))
        subs = {}
        free = e.free_symbols
        for fam, root in ((SOL_U, self.u), (SOL_V, self.v), (COEF_Q, self.q)):
            need = max((k for k in range(MAX_JET_ORDER + 1) if fam[k] in free), default=-1)
            cur = root
            for k in range(need + 1):
                subs[fam[k]] = cur
                cur = sp.cancel(self.dx(cur))
        return sp.cancel(sp.together(e.xreplace(subs)))

    def is_zero(self, e) -> bool:
        return zero_test(self.reduce(e))


def reduce(e, ctx: SourceContext) -> sp.Expr:
    return ctx.reduce(e)


@dataclass(frozen=True)
class GeneratorSet:
    """The n+4 point-symmetry generators of a maximal-symmetry equation."""

    n: int
    solution: tuple  # V_0 ... V_{n-1}, the abelian ideal
    homogeneity: VectorField  # W_y
    special: tuple  # (F_n, G_n, H_n), the sl2 triplet

    def __iter__(self):
        yield from self.solution
        yield self.homogeneity
        yield from self.special

    def by_name(self) -> dict:
        names = {f"V{k}": vf for k, vf in enumerate(self.solution)}
        names["Wy"] = self.homogeneity
        names[f"F{self.n}"], names[f"G{self.n}"], names[f"H{self.n}"] = self.special
        return names

    def specialize(self, ctx: "SourceContext") -> "GeneratorSet":
        """Generators with a concrete solution pair substituted."""
        def conv(vf: VectorField) -> VectorField:
            return VectorField(ctx.reduce(vf.xi), ctx.reduce(vf.psi), name=vf.name)

        return GeneratorSet(
            n=self.n,
            solution=tuple(conv(vf) for vf in self.solution),
            homogeneity=conv(self.homogeneity),
            special=tuple(conv(vf) for vf in self.special),
        )


def solution_basis(n: int) -> list:
    """The n solutions s_k = u^(n-k-1) v^k of the order-n equation."""
    if n < 2:
        raise BadOrder(f"order must be >= 2, got {n}")
    return [SOL_U[0] ** (n - k - 1) * SOL_V[0] ** k for k in range(n)]


def generators(n: int) -> GeneratorSet:
    """Generators V_0..V_{n-1}, W_y, F_n, G_n, H_n in terms of u and v."""
    if n < 2:
        raise BadOrder(f"order must be >= 2, got {n}")
    u, u1 = SOL_U[0], SOL_U[1]
    v, v1 = SOL_V[0], SOL_V[1]
    y = JET[0]
    sols = tuple(
        VectorField(0, s, name=f"V{k}") for k, s in enumerate(solution_basis(n))
    )
    return GeneratorSet(
        n=n,
        solution=sols,
        homogeneity=VectorField(0, y, name="Wy"),
        special=(
            VectorField(u**2, (n - 1) * u * u1 * y, name=f"F{n}"),
            VectorField(2 * u * v, (n - 1) * (u * v1 + u1 * v) * y, name=f"G{n}"),
            VectorField(-(v**2), -(n - 1) * v * v1 * y, name=f"H{n}"),
        ),
    )


def commutator(v1: VectorField, v2: VectorField, rates=None) -> VectorField:
    """Lie bracket of point vector fields."""
    def act(vf, f):
        return vf.xi * dx_fixed_jets(f, rates) + vf.psi * sp.diff(f, JET[0])

    return VectorField(
        sp.expand(act(v1, v2.xi) - act(v2, v1.xi)),
        sp.expand(act(v1, v2.psi) - act(v2, v1.psi)),
    )


def source_transformation(n: int, ctx: SourceContext | None = None):
    """The point transformation carrying the trivial equation to order n.

    z has derivative 1/u^2; with the Wronskian w(u,v)=W constant this
    antiderivative is v/(W u), which is used as the closed form.  The
    dependent map is w = u^(1-n) y (scaling constant fixed to 1).
    """
    ctx = ctx or SourceContext.make_symbolic()
    if n < 2:
        raise BadOrder(f"order must be >= 2, got {n}")
    zeta = canon(ctx.v / (ctx.wronskian * ctx.u))
    return _transform.PointTransformation(
        zeta,
        ctx.u ** (1 - n) * JET[0],
        zeta_x=ctx.u ** (-2),
        rates=ctx.rates,
    )


def build_lode(n: int, ctx: SourceContext | None = None) -> DiffEq:
    """Monic normal-form linear equation of order n and maximal symmetry.

    Pushes w^(n) = 0 through the source transformation; in symbolic mode
    the solution symbol u must cancel identically from the monic result,
    leaving coefficients in q and its derivatives only.
    """
    ctx = ctx or SourceContext.make_symbolic()
    if n < 2:
        raise BadOrder(f"order must be >= 2, got {n}")
    second = {SOL_U[2]: -COEF_Q[0] * SOL_U[0]}
    w = ctx.u ** (1 - n) * JET[0]
    for _ in range(n):
        w = ctx.dx(w)
        if ctx.symbolic:
            w = w.subs(second)
        w = sp.expand(ctx.u**2 * w)
    lead = sp.cancel(sp.diff(w, JET[n]))
    delta = canon(w / lead)
    if ctx.symbolic:
        residue = delta.free_symbols & (set(SOL_U) | set(SOL_V))
        if residue:
            raise EliminationFailed(delta)
    return DiffEq(sp.expand(delta), n)


def canonical_lagrangian(n: int) -> Lagrangian:
    """Order-n/2 Lagrangian of the trivial equation: (-1)^(n/2) (w^(n/2))^2 / 2.

    Written in the shared jet coordinates; its Euler-Lagrange expression is
    exactly w^(n).
    """
    if n % 2:
        raise OddOrder(f"no Lagrangian construction for odd order {n}")
    if n < 2:
        raise BadOrder(f"order must be >= 2, got {n}")
    m = n // 2
    return Lagrangian(sp.Rational(-1, 1) ** m * JET[m] ** 2 / 2, m)


def transformed_lagrangian(n: int, ctx: SourceContext | None = None) -> Lagrangian:
    """The canonical Lagrangian pushed through the source transformation."""
    ctx = ctx or SourceContext.make_symbolic()
    if n % 2:
        raise OddOrder(f"no Lagrangian construction for odd order {n}")
    sigma = source_transformation(n, ctx)
    L = _transform.transform_lagrangian(canonical_lagrangian(n), sigma, simplify=ctx.reduce)
    return Lagrangian(ctx.reduce(L.density), n // 2)


def natural_lagrangian(n: int, ctx: SourceContext | None = None) -> Lagrangian:
    """Reduction of y*Delta_n[y]/2 to a diagonal density of order n/2.

    Integration by parts, highest derivative first, dropping total
    derivatives; mixed products of distinct jets are eliminated until the
    density is a combination of squares c_m(x) (y^(m))^2.  The diagonal
    fixpoint is the canonical representative used by the variational
    coefficient identities.
    """
    ctx = ctx or SourceContext.make_symbolic()
    if n % 2:
        raise OddOrder(f"no Lagrangian construction for odd order {n}")
    sym = SourceContext.make_symbolic()
    dens = sp.expand(JET[0] * build_lode(n, sym).delta / 2)
    while True:
        done = True
        out = sp.Integer(0)
        for term in sp.Add.make_args(dens):
            jets = sorted(k for k in range(MAX_JET_ORDER + 1) if JET[k] in term.free_symbols)
            if not jets:
                out += term
                continue
            total_degree = sum(sp.degree(term, JET[k]) for k in jets)
            if total_degree > 2:
                raise ValueError("density is not quadratic in the jets")
            if total_degree == 1:
                j = jets[-1]
                if j == 0:
                    out += term
                    continue
                out += sp.expand(-total_derivative(term / JET[j]) * JET[j - 1])
                done = False
            elif len(jets) == 1:
                out += term  # diagonal square, already reduced
            else:
                i, j = jets[0], jets[-1]
                c = term / (JET[i] * JET[j])
                if j - i >= 2:
                    out += sp.expand(-total_derivative(c * JET[i]) * JET[j - 1])
                else:
                    # c y_i y_{i+1} differs from -c' y_i^2/2 by a total derivative
                    out += sp.expand(-total_derivative(c) * JET[i] ** 2 / 2)
                done = False
        dens = sp.expand(out)
        if done:
            break
    if not ctx.symbolic:
        dens = ctx.reduce(dens)
    return Lagrangian(dens, n // 2)


def reference_transformed_lagrangian(n: int) -> Lagrangian:
    """Fixed reference densities for the transformed Lagrangians, n in {2,4,6}.

    Stored with the shorthand i = u'/u written out.  The sign of the
    zeroth-order term of the n=6 entry is pinned by the Euler-operator
    consistency oracle E(L) = Delta_6.
    """
    i = SOL_U[1] / SOL_U[0]
    q, q1 = COEF_Q[0], COEF_Q[1]
    y, y1, y2, y3 = JET[0], JET[1], JET[2], JET[3]
    half = sp.Rational(1, 2)
    if n == 2:
        return Lagrangian(-half * i**2 * y**2 + i * y * y1 - y1**2 / 2, 1)
    if n == 4:
        return Lagrangian(
            sp.Rational(9, 2) * (q + 2 * i**2) ** 2 * y**2
            - 12 * i * (q + 2 * i**2) * y * y1
            + 8 * i**2 * y1**2
            + 3 * (q + 2 * i**2) * y * y2
            - 4 * i * y1 * y2
            + y2**2 / 2,
            2,
        )
    if n == 6:
        a = 9 * q * i + 12 * i**3 - q1
        b = 13 * q + 36 * i**2
        return Lagrangian(
            -sp.Rational(25, 2) * y**2 * a**2
            + 5 * b * y * a * y1
            - half * b**2 * y1**2
            - 45 * i * y * a * y2
            + 9 * (13 * q * i + 36 * i**3) * y1 * y2
            - sp.Rational(81, 2) * i**2 * y2**2
            + y * (45 * q * i + 60 * i**3 - 5 * q1) * y3
            - b * y1 * y3
            + 9 * i * y2 * y3
            - half * y3**2,
            3,
        )
    raise ValueError(f"no stored reference for order {n}")


def reference_first_integral_homogeneity(n: int) -> sp.Expr:
    """Fixed reference first integrals of W_y for n in {3, 5, 7}."""
    q, q1, q2, q3, q4 = COEF_Q[:5]
    y, y1, y2, y3, y4, y5, y6 = JET[:7]
    half = sp.Rational(1, 2)
    if n == 3:
        return 2 * q * y**2 - y1**2 / 2 + y * y2
    if n == 5:
        return (
            10 * y * q1 * y1
            - 10 * q * y1**2
            + 4 * y**2 * (8 * q**2 + q2)
            + 20 * q * y * y2
            + y2**2 / 2
            - y1 * y3
            + y * y4
        )
    if n == 7:
        return (
            -28 * y1**2 * (14 * q**2 + q2)
            - 28 * q1 * y1 * y2
            + y * (784 * q**2 + 84 * q2) * y2
            + 28 * q * y2**2
            + 28 * y * y1 * (28 * q * q1 + q3)
            + 84 * y * q1 * y3
            - 56 * q * y1 * y3
            - half * y3**2
            + 6 * y**2 * (192 * q**3 + 33 * q1**2 + 52 * q * q2 + q4)
            + 56 * q * y * y4
            + y2 * y4
            - y1 * y5
            + y * y6
        )
    raise ValueError(f"no stored reference for order {n}")
