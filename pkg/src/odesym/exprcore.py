"""Exact symbolic kernel over jet-space atoms.

Expressions are ordinary sympy objects built from a fixed atom registry:
the independent variable ``x``, jet variables ``y, y1, y2, ...``, the
derivative ladders ``u, u1, ...``, ``v, v1, ...``, ``q, q1, ...`` of three
symbol functions of x, and a small set of named parameters.  Coefficients
are exact rationals.  Elementary function applications are restricted to
``ln(g)``, ``exp(g)`` and ``g^(p/r)`` with ``g`` a rational expression.

All atoms carry positive-real assumptions, matching the sampling domain
(1/10, 10) used by the randomized part of :func:`zero_test`.
"""

from __future__ import annotations

import hashlib
import random
from fractions import Fraction

import sympy as sp

MAX_JET_ORDER = 24


class UnsupportedForm(ValueError):
    """An expression uses a function application outside the atom grammar."""


class Inconclusive(RuntimeError):
    """zero_test could not decide: sampling says zero, symbolics disagree."""

    def __init__(self, expr, message="zero test inconclusive"):
        super().__init__(f"{message}: {expr}")
        self.expr = expr


def _ladder(base: str) -> tuple:
    return tuple(
        sp.Symbol(base if k == 0 else f"{base}{k}", positive=True)
        for k in range(MAX_JET_ORDER + 1)
    )


X = sp.Symbol("x", positive=True)
JET = _ladder("y")
SOL_U = _ladder("u")
SOL_V = _ladder("v")
COEF_Q = _ladder("q")

PARAM_NAMES = ("k1", "k2", "k3", "lam", "theta", "alpha", "a0", "a1", "a2", "a3")
PARAMS = {name: sp.Symbol(name, positive=True) for name in PARAM_NAMES}

_LADDERS = {"y": JET, "u": SOL_U, "v": SOL_V, "q": COEF_Q}
_REGISTRY = {str(s): s for fam in (JET, SOL_U, SOL_V, COEF_Q) for s in fam}
_REGISTRY["x"] = X
_REGISTRY.update({name: sym for name, sym in PARAMS.items()})

_JET_SET = frozenset(JET)
_SOLDER_SET = frozenset(SOL_U) | frozenset(SOL_V) | frozenset(COEF_Q)
_PARAM_SET = frozenset(PARAMS.values())


def jet(k: int) -> sp.Symbol:
    """Jet variable of order k (y for k=0)."""
    if not 0 <= k <= MAX_JET_ORDER:
        raise ValueError(f"jet order {k} outside supported range")
    return JET[k]


def resolve_name(name: str) -> sp.Symbol | None:
    """Registry symbol for a grammar identifier, or None."""
    return _REGISTRY.get(name)


def atom_kind(sym: sp.Symbol) -> str | None:
    if sym is X:
        return "x"
    if sym in _JET_SET:
        return "jet"
    if sym in _SOLDER_SET:
        return str(sym)[0]
    if sym in _PARAM_SET:
        return "param"
    return None


def base_rates() -> dict:
    """x-derivative of each atom: the ladder shifts, x maps to 1."""
    rates = {X: sp.Integer(1)}
    for fam in (JET, SOL_U, SOL_V, COEF_Q):
        for k in range(MAX_JET_ORDER):
            rates[fam[k]] = fam[k + 1]
    return rates


_BASE_RATES = base_rates()


def max_jet_order(e) -> int:
    """Highest jet order present, or -1 for jet-free expressions."""
    e = sp.sympify(e)
    orders = [k for k in range(MAX_JET_ORDER + 1) if JET[k] in e.free_symbols]
    return max(orders, default=-1)


def _validate(e, inside_elementary=False) -> None:
    if isinstance(e, sp.Symbol):
        return
    if isinstance(e, (sp.Integer, sp.Rational)):
        return
    if isinstance(e, sp.Float):
        raise UnsupportedForm(f"inexact coefficient {e}; use exact rationals")
    if isinstance(e, (sp.Add, sp.Mul)):
        for a in e.args:
            _validate(a, inside_elementary)
        return
    if isinstance(e, sp.Pow):
        base, exponent = e.args
        if isinstance(exponent, sp.Integer):
            _validate(base, inside_elementary)
            return
        if isinstance(exponent, sp.Rational):
            if inside_elementary:
                raise UnsupportedForm(f"nested elementary application in {e}")
            _validate(base, inside_elementary=True)
            return
        raise UnsupportedForm(f"non-rational exponent in {e}")
    if isinstance(e, (sp.log, sp.exp)):
        if inside_elementary:
            raise UnsupportedForm(f"nested elementary application in {e}")
        _validate(e.args[0], inside_elementary=True)
        return
    raise UnsupportedForm(f"unsupported node {type(e).__name__} in {e}")


def canon(e) -> sp.Expr:
    """Canonical form: a single rational normal form p/q over the atoms.

    Idempotent, and the zero test for rational expressions: a rational
    expression is identically zero iff its canonical form is literal 0.
    """
    e = sp.sympify(e)
    _validate(e)
    return sp.cancel(sp.together(e))


def partial(e, a) -> sp.Expr:
    """Formal partial derivative with all other atoms held fixed."""
    e = sp.sympify(e)
    if not isinstance(a, sp.Symbol):
        raise ValueError(f"partial expects an atom symbol, got {a}")
    return sp.diff(e, a)


def is_rational_expr(e) -> bool:
    """True when the expression is rational over the atoms (no ln/exp/roots)."""
    e = sp.sympify(e)
    if e.atoms(sp.Function):
        return False
    for p in e.atoms(sp.Pow):
        if not isinstance(p.exp, sp.Integer):
            return False
    return True


def _seeded_rng(e) -> random.Random:
    digest = hashlib.md5(sp.srepr(e).encode()).hexdigest()
    return random.Random(int(digest[:16], 16))


def _sample_point(rng, symbols) -> dict:
    return {
        s: sp.Rational(Fraction(rng.randint(10, 1000), 100)) for s in symbols
    }


def _eval_at(e, subs):
    """(value, magnitude reference) at a sample point, or None if singular."""
    terms = sp.Add.make_args(sp.expand(e))
    total = sp.Float(0, 30)
    ref = sp.Float(0, 30)
    for t in terms:
        val = t.subs(subs).evalf(30)
        if not val.is_number or val.has(sp.zoo, sp.oo, sp.nan) or not val.is_real:
            return None
        total += val
        ref += abs(val)
    return total, ref


def _symbolic_confirm(e) -> bool:
    for simplifier in (
        lambda t: sp.cancel(sp.radsimp(t)),
        lambda t: sp.cancel(sp.powsimp(t, force=True)),
        lambda t: sp.cancel(sp.logcombine(sp.expand(t), force=True)),
        sp.simplify,
    ):
        try:
            if simplifier(e) == 0:
                return True
        except Exception:
            continue
    return False


def zero_test(e, points: int = 20, tol=sp.Rational(1, 10**9)) -> bool:
    """Decide whether an expression vanishes identically.

    Rational expressions are decided exactly by the canonical form.  For
    expressions with elementary atoms the canonical form decides only the
    nonzero direction; a canonical nonzero is then sampled at ``points``
    random rational points in (1/10, 10), all atoms independent.  If every
    sample is below the relative tolerance, a cheap symbolic confirmation
    must succeed, otherwise :class:`Inconclusive` is raised.
    """
    c = canon(e)
    if c == 0:
        return True
    if is_rational_expr(c):
        return False
    if not c.free_symbols:
        val = c.evalf(30)
        if abs(val) > tol:
            return False
        return _confirm_or_raise(c)
    if _any_sample_nonzero(c, points, tol):
        return False
    return _confirm_or_raise(c)


def _confirm_or_raise(c) -> bool:
    if _symbolic_confirm(c):
        return True
    raise Inconclusive(c)


def _any_sample_nonzero(c, points, tol) -> bool:
    rng = _seeded_rng(c)
    symbols = sorted(c.free_symbols, key=str)
    taken = 0
    attempts = 0
    while taken < points:
        attempts += 1
        if attempts > 40 * points:
            raise Inconclusive(c, "could not find regular sample points")
        result = _eval_at(c, _sample_point(rng, symbols))
        if result is None:
            continue
        taken += 1
        val, ref = result
        if abs(val) > tol * max(sp.Float(1, 30), ref):
            return True
    return False


def numeric_witness(e, points: int = 20, tol=sp.Rational(1, 10**9)):
    """Best nonzero sample of an expression: (point, relative value) or None.

    Used to certify refutations: a claim "e is not identically zero" is
    backed by a concrete sample where the relative value exceeds ``tol``.
    """
    c = canon(e)
    if c == 0:
        return None
    rng = _seeded_rng(c)
    symbols = sorted(c.free_symbols, key=str)
    best = None
    taken = 0
    attempts = 0
    while taken < points and attempts < 40 * points:
        attempts += 1
        point = _sample_point(rng, symbols)
        result = _eval_at(c, point)
        if result is None:
            continue
        taken += 1
        val, ref = result
        rel = abs(val) / max(sp.Float(1, 30), ref)
        if best is None or rel > best[1]:
            best = (point, rel)
    if best is None or best[1] <= tol:
        return None
    return best
