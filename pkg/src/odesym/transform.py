"""Point transformations acting on the jet space.

A transformation sigma = (zeta(x,y), phi(x,y)) reads: the new independent
variable is z = zeta, the new dependent variable is w = phi.  Objects
written in (z, w)-jet coordinates use the same atom family as the source
side; transforming substitutes the jet images z -> zeta, w^(k) -> image.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .exprcore import JET, X, canon, max_jet_order, zero_test
from .jetcalc import DiffEq, Lagrangian, VectorField, dx_fixed_jets, total_derivative


class SingularMap(ValueError):
    """The transformation degenerates (zero Jacobian or zero D_x zeta)."""


class MissingInverse(ValueError):
    """Push-forward requested for a map family without a usable inverse."""


@dataclass(frozen=True)
class PointTransformation:
    """Invertible change of variables z = zeta(x, y), w = phi(x, y).

    ``zeta_x`` may be supplied when the stored zeta is an antiderivative
    whose derivative has a simpler normal form (the source transformation
    stores z = v/(W u) but uses z_x = 1/u^2 directly).  ``rates`` carries
    x-derivatives of opaque atoms appearing in the component functions.
    """

    zeta: sp.Expr
    phi: sp.Expr
    zeta_x: sp.Expr = None
    inverse: tuple | None = None
    rates: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "zeta", sp.sympify(self.zeta))
        object.__setattr__(self, "phi", sp.sympify(self.phi))
        for c in (self.zeta, self.phi):
            if max_jet_order(c) > 0:
                raise ValueError(f"transformation component {c} involves jets")
        zx = self.zeta_x if self.zeta_x is not None else dx_fixed_jets(self.zeta, self.rates)
        object.__setattr__(self, "zeta_x", sp.sympify(zx))
        jac = self.zeta_x * self.phi_y() - self.zeta_y() * self.phi_x()
        if zero_test(jac):
            raise SingularMap(f"Jacobian of ({self.zeta}, {self.phi}) vanishes")

    def zeta_y(self):
        return sp.diff(self.zeta, JET[0])

    def phi_x(self):
        return dx_fixed_jets(self.phi, self.rates)

    def phi_y(self):
        return sp.diff(self.phi, JET[0])

    def dx(self, e):
        return total_derivative(e, rates=self.rates)

    def base_substitution(self) -> dict:
        """Images of the base coordinates: z -> zeta, w -> phi."""
        return {X: self.zeta, JET[0]: self.phi}


def identity_map() -> PointTransformation:
    return PointTransformation(X, JET[0])


def compose(outer: PointTransformation, inner: PointTransformation) -> PointTransformation:
    """The transformation outer o inner."""
    subs = inner.base_substitution()
    rates = {**inner.rates, **outer.rates}
    return PointTransformation(
        outer.zeta.subs(subs, simultaneous=True),
        outer.phi.subs(subs, simultaneous=True),
        rates=rates,
    )


def jet_substitution(sigma: PointTransformation, order: int, simplify=None) -> dict:
    """Images of z, w, w', ..., w^(order) as expressions in the source jets.

    The total derivative of the image ladder divides by D_x zeta at each
    level: w^(k+1) image = D_x(w^(k) image) / D_x(zeta).
    """
    simplify = simplify or canon
    dz = sigma.zeta_x + sigma.zeta_y() * JET[1]
    if zero_test(dz):
        raise SingularMap("D_x zeta vanishes identically")
    images = {X: sigma.zeta, JET[0]: sigma.phi}
    current = sigma.phi
    for k in range(order):
        current = simplify(sigma.dx(current) / dz)
        images[JET[k + 1]] = current
    return images


def transform_equation(eq: DiffEq, sigma: PointTransformation, simplify=None) -> DiffEq:
    """Image of an equation written in (z, w), normalized monic in y^(n)."""
    simplify = simplify or canon
    images = jet_substitution(sigma, eq.order, simplify)
    delta = eq.delta.subs(images, simultaneous=True)
    lead = sp.cancel(sp.diff(sp.together(delta), JET[eq.order]))
    if sp.diff(lead, JET[eq.order]) != 0:
        raise SingularMap("transformed equation is nonlinear in its top derivative")
    return DiffEq(sp.expand(simplify(delta / lead)), eq.order)


def transform_equation_covariant(eq: DiffEq, sigma: PointTransformation, simplify=None) -> DiffEq:
    """Image of an equation weighted by D_x(zeta) * phi_y.

    This is the representative whose pairing with transformed
    characteristics preserves total derivatives: if Q*Delta is exact then
    so is Q'*Delta' for the push-forward, with Q' the plain characteristic.
    Divergence-symmetry membership is stable under point transformations
    for exactly this weighting; the monic form differs from it by a
    differential-function factor.
    """
    simplify = simplify or canon
    images = jet_substitution(sigma, eq.order, simplify)
    delta = eq.delta.subs(images, simultaneous=True)
    weight = sigma.zeta_x * sigma.phi_y()
    return DiffEq(simplify(delta * weight), eq.order)


def pushforward(v: VectorField, sigma: PointTransformation) -> VectorField:
    """Vector field corresponding to v under the change of variables.

    v is written in the (z, w) coordinates; the result acts in (x, y).
    Supported for fiber-preserving maps z = zeta(x), w = phi(x, y) with
    phi_y != 0, which is the family the construction needs; general
    (x,y)-mixing maps would require a symbolic inverse.
    """
    if not zero_test(sigma.zeta_y()):
        raise MissingInverse("push-forward implemented for fiber-preserving maps only")
    phi_y = sigma.phi_y()
    if zero_test(phi_y):
        raise SingularMap("phi_y vanishes identically")
    subs = sigma.base_substitution()
    xi_t = v.xi.subs(subs, simultaneous=True)
    psi_t = v.psi.subs(subs, simultaneous=True)
    xi = canon(xi_t / sigma.zeta_x)
    psi = canon((psi_t - xi * sigma.phi_x()) / phi_y)
    return VectorField(xi, psi, name=v.name)


def transform_lagrangian(L: Lagrangian, sigma: PointTransformation, simplify=None) -> Lagrangian:
    """Image density L(jet images) * D_x zeta, same declared order."""
    simplify = simplify or canon
    images = jet_substitution(sigma, L.order, simplify)
    dz = sigma.zeta_x + sigma.zeta_y() * JET[1]
    density = simplify(L.density.subs(images, simultaneous=True) * dz)
    return Lagrangian(density, max(L.order, max_jet_order(density)))


def transform_first_integral(F, sigma: PointTransformation, simplify=None) -> sp.Expr:
    """Image of a first integral: plain substitution of the jet images."""
    simplify = simplify or canon
    F = sp.sympify(F)
    images = jet_substitution(sigma, max(max_jet_order(F), 0), simplify)
    return simplify(F.subs(images, simultaneous=True))
