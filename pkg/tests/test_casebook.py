import math

import pytest
import sympy as sp

from odesym.casebook import (
    CASE_IDS,
    SingularityEncountered,
    example_equation_display,
    example_first_integral_components,
    example_map,
    independence_determinant,
    numeric_validate,
    run_case,
)
from odesym.exprcore import COEF_Q, JET, canon
from odesym.jetcalc import DiffEq
from odesym.maxsym import SourceContext, build_lode, generators
from odesym.noether import first_integral
from odesym.transform import transform_equation

CTX = SourceContext.make_symbolic()


def test_inventory_is_complete():
    assert CASE_IDS == ("C1", "C2", "C3", "C4", "C5", "C6", "C7")
    with pytest.raises(KeyError):
        run_case("C8")


@pytest.mark.parametrize("case_id", CASE_IDS)
def test_case_verifies(case_id):
    report = run_case(case_id)
    assert report.case_id == case_id
    assert report.claims, "no claim may be silently omitted"
    failures = [c for c in report.claims if c.status != "verified"]
    assert not failures, failures


def test_case_claim_counts():
    assert len(run_case("C1").claims) == 3
    assert len(run_case("C2").claims) == 3
    assert len(run_case("C4").claims) == 12
    assert len(run_case("C6").claims) == 14


def test_report_dict_shape():
    d = run_case("C1").as_dict()
    assert set(d) == {"case", "claims"}
    for claim in d["claims"]:
        assert set(claim) == {"id", "status", "residual", "paper_ref", "millis"}


def test_numeric_drift_small_for_true_integral():
    F3 = first_integral(generators(3).homogeneity, build_lode(3, CTX), CTX)
    drift = numeric_validate(F3, q_expr=1, ic=(1.0, 0.0, 1.0), span=2, steps=2000)
    assert drift < 1e-6


def test_numeric_drift_detects_corruption():
    F3 = first_integral(generators(3).homogeneity, build_lode(3, CTX), CTX)
    corrupted = F3.expr + sp.Rational(2, 100) * COEF_Q[0] * JET[0] ** 2
    drift = numeric_validate(
        corrupted, q_expr=1, ic=(1.0, 0.0, 1.0), span=2, steps=2000, equation=F3.equation
    )
    assert drift > 1e-3


def test_numeric_drift_exact_linear_dynamics():
    drift = numeric_validate(JET[1], ic=(1.0, 0.5), span=2, steps=200, equation=DiffEq(JET[2], 2))
    assert drift < 1e-12


def test_numeric_singularity_reported():
    eq = transform_equation(DiffEq(JET[4], 4), example_map())
    component = example_first_integral_components()[0]
    with pytest.raises(SingularityEncountered):
        # y crosses zero almost immediately
        numeric_validate(component, ic=(0.05, -40.0, 0.0, 0.0), span=2, steps=400, equation=eq)


def test_independence_determinant_nonzero():
    det = independence_determinant(example_first_integral_components())
    assert abs(det) > 1e-6


def test_symbolic_and_numeric_agree():
    # every symbolically verified first integral stays flat numerically
    wy = generators(3).homogeneity
    for n, ic in ((3, (1.0, 0.0, 1.0)), (5, (1.0, 0.2, -0.3, 0.1, 0.5))):
        F = first_integral(wy, build_lode(n, CTX), CTX)
        assert numeric_validate(F, q_expr=1, ic=ic, span=2, steps=2000) < 1e-4
