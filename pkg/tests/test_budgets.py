import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rankminors.budgets import REGISTRY, BudgetExpression, budget_eval, describe
from rankminors.errors import ParameterOutOfRange, UnknownBudget

GOLDEN = json.loads((Path(__file__).parent / "golden" / "budgets.json").read_text())


@pytest.mark.parametrize("case", GOLDEN, ids=[f"{c['name']}-{i}" for i, c in enumerate(GOLDEN)])
def test_golden(case):
    assert budget_eval(BudgetExpression(case["name"], case["params"])) == int(case["value"])


def test_golden_count():
    assert len(GOLDEN) >= 20


def test_headline_values():
    assert budget_eval("F4trp", l=2) == 9830400
    assert budget_eval("Gpr", d=2, l=11, q=7) == 11


@given(st.integers(1, 6), st.sampled_from(["sr3", "1xsr4", "pr22", "tr", "matrix"]))
def test_multi_base_cases(l, base):
    params = {"base": base, "l": l, "s": 1}
    if base == "tr":
        params["d"] = 3
    single = {"sr3": "F3sr", "1xsr4": "F4_1xsr", "pr22": "F4pr22"}.get(base)
    f1 = budget_eval("Fmulti", **params)
    if single:
        assert f1 == budget_eval(single, l=l)
    else:
        assert f1 == l
    assert budget_eval("Hmulti", **params) == 0


@given(st.integers(1, 5), st.integers(2, 5))
def test_multi_recursions(l, s):
    base = {"base": "sr3", "l": l}
    F = lambda x: budget_eval("F3sr", l=x)
    assert budget_eval("Fmulti", s=s, **base) == F(s * l) + budget_eval("Fmulti", s=s - 1, **base)
    assert budget_eval("Hmulti", s=s, **base) == F(s * l) + budget_eval("Hmulti", s=s - 1, **base)
    assert budget_eval("Gmulti", s=s, **base) == budget_eval("G3sr", l=s * l)


@given(st.integers(1, 4), st.integers(2, 3))
def test_pr_recursion(l, q):
    for d in range(3, 5):
        assert budget_eval("Fpr", d=d, l=l, q=q) == (q ** l * budget_eval("Fpr", d=d - 1, l=l, q=q)) ** (d - 1)


def test_gpr_with_supplied_function():
    A = lambda x: 2 * x
    assert budget_eval("Gpr", d=3, l=1, q=2, A=A) == 6
    assert budget_eval("Gpr", d=4, l=1, q=2, A=A) == 2 * (6 + 2)


def test_gpr_needs_function_above_order_2():
    with pytest.raises(ParameterOutOfRange):
        budget_eval("Gpr", d=3, l=1, q=2)


def test_errors():
    with pytest.raises(UnknownBudget):
        budget_eval("Nope", l=1)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("F4trp", l=1)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("F3sr", l=0)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("F3sr")
    with pytest.raises(ParameterOutOfRange):
        budget_eval("F3sr", l=1.5)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("Fmulti", base="sr3", d=4, l=1, s=1)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("Gprime_multi", base="sr3", l=1, s=2)
    with pytest.raises(ParameterOutOfRange):
        budget_eval("EssEquiv", l=1, m=1, d=3, dprime=3)


def test_results_are_exact_integers():
    v = budget_eval("Gprime_tr", d=4, l=2)
    assert isinstance(v, int) and v > 10 ** 1000


def test_describe_lists_all():
    assert set(describe()) == set(REGISTRY)
