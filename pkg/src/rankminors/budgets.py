"""Exact big-integer evaluation of the size and rank budgets of the minor theorems.

Every budget is a named function of integer parameters.  Names follow the
pattern <letter><order><notion>, e.g. F4trp or Gprime_tr; the multi-tensor
budgets (Fmulti, Gmulti, Hmulti, Gprime_multi) take a `base` naming the
single-tensor pair they are built from.  Nothing here touches floats.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import ParameterOutOfRange, UnknownBudget


@dataclass(frozen=True)
class BudgetExpression:
    name: str
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "params": {k: v for k, v in sorted(self.params.items()) if not callable(v)}}


def _int(params: dict, key: str, low: int = 1) -> int:
    if key not in params:
        raise ParameterOutOfRange(f"missing parameter {key}")
    v = params[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParameterOutOfRange(f"parameter {key} must be an integer")
    if v < low:
        raise ParameterOutOfRange(f"parameter {key}={v} is below {low}")
    return v


# single-tensor budgets


def f_pr(d: int, l: int, q: int) -> int:
    """Minor size for partition rank over a field of size q."""
    if d < 2:
        raise ParameterOutOfRange("order must be at least 2")
    v = l
    for k in range(3, d + 1):
        v = (q ** l * v) ** (k - 1)
    return v


def g_pr(d: int, l: int, q: int, A: Callable[[int], int] | None = None) -> int:
    """Rank threshold for partition rank; orders above 2 need the bias-to-rank map A."""
    if d < 2:
        raise ParameterOutOfRange("order must be at least 2")
    if d == 2:
        return l
    if A is None:
        raise ParameterOutOfRange("G_pr for order >= 3 needs the function A_{d,F}; pass A=callable")
    return int(A(g_pr(d - 1, l, q, A) + l + 1))


def gprime_tr(d: int, l: int) -> int:
    """Essential tensor rank forcing disjoint tensor rank l.

    The constants are read as 2*10^6 and exponent (3*2^(d-1))*(3*2^d).
    """
    if d < 2:
        raise ParameterOutOfRange("order must be at least 2")
    v = l
    for k in range(3, d + 1):
        v = (2 * 10 ** 6) ** (2 ** k) * v ** ((3 * 2 ** (k - 1)) * (3 * 2 ** k))
    return v


def trp4(l: int) -> int:
    if l < 2:
        raise ParameterOutOfRange("the tripartition-rank budget needs l >= 2")
    return 300 * l ** (3 * l + 9)


def f_sr3(l: int) -> int:
    return 48 * l ** 3


def g_sr3(l: int) -> int:
    return 51 * l ** 3


def f_1xsr4(l: int) -> int:
    return f_sr3(l)


def g_1xsr4(l: int) -> int:
    return l * g_sr3(l)


def f_pr22(l: int) -> int:
    return f_1xsr4(112 * l ** 4)


def g_pr22(l: int) -> int:
    return g_1xsr4(112 * l ** 4) + 3 * l


def dtr3(l: int) -> int:
    """Essential tensor rank forcing disjoint tensor rank l for order 3."""
    return 17500 * l ** 3


def dsr3(l: int) -> int:
    return 17500 * ((l * l + l + 5) * l * (4 * l) ** 2) ** 3 + 3 * l


def equivalence(l: int, m: int) -> int:
    return l * (l * m + l * l + 1)


def slice_to_tensor(m: int, r: int) -> int:
    return m * r * r


def essential_equivalence(l: int, m: int, d: int, dprime: int) -> int:
    if not 1 <= dprime < d:
        raise ParameterOutOfRange("need 1 <= d' < d")
    return l * l * (m + dprime * (d - dprime)) + l ** 3 + l


def essential_flattening(l: int, m: int) -> int:
    return (m + 2) * l * l


def etr_from_slices(d: int, l: int) -> int:
    return (4 * l ** 3) ** (2 ** d)


def product_f(l: int, *fs: int) -> int:
    return max((l,) + fs)


def product_g(l: int, *gs: int) -> int:
    out = l ** (len(gs) - 1)
    for g in gs:
        out *= g
    return out


# bases for the multi-tensor budgets: (F, G, G') as functions of (d, l, params)

def _base_pr(p):
    q = _int(p, "q", 2)
    return (lambda d, l: f_pr(d, l, q), lambda d, l: g_pr(d, l, q, p.get("A")), None)


_BASES: dict = {
    "tr": lambda p: (lambda d, l: l, lambda d, l: l, gprime_tr),
    "matrix": lambda p: (lambda d, l: l, lambda d, l: l, None),
    "pr": _base_pr,
    "sr3": lambda p: (lambda d, l: f_sr3(l), lambda d, l: g_sr3(l), None),
    "1xsr4": lambda p: (lambda d, l: f_1xsr4(l), lambda d, l: g_1xsr4(l), None),
    "pr22": lambda p: (lambda d, l: f_pr22(l), lambda d, l: g_pr22(l), None),
    "trp4": lambda p: (lambda d, l: trp4(l), lambda d, l: trp4(l), None),
}

_BASE_ORDER = {"matrix": 2, "sr3": 3, "1xsr4": 4, "pr22": 4, "trp4": 4}


def _base(p: dict):
    name = p.get("base")
    if name not in _BASES:
        raise ParameterOutOfRange(f"unknown base {name!r}; choose from {sorted(_BASES)}")
    d = p.get("d", _BASE_ORDER.get(name))
    if d is None:
        raise ParameterOutOfRange("missing parameter d")
    p = dict(p, d=d)
    d = _int(p, "d", 2)
    if name in _BASE_ORDER and d != _BASE_ORDER[name]:
        raise ParameterOutOfRange(f"base {name} is for order {_BASE_ORDER[name]}")
    return d, _BASES[name](p)


def f_multi(p: dict) -> int:
    d, (F, _, _) = _base(p)
    l, s = _int(p, "l"), _int(p, "s")
    return sum(F(d, j * l) for j in range(1, s + 1))


def g_multi(p: dict) -> int:
    d, (_, G, _) = _base(p)
    l, s = _int(p, "l"), _int(p, "s")
    return G(d, s * l)


def h_multi(p: dict) -> int:
    d, (F, _, _) = _base(p)
    l, s = _int(p, "l"), _int(p, "s")
    return sum(F(d, j * l) for j in range(2, s + 1))


def gprime_multi(p: dict) -> int:
    d, (_, G, Gp) = _base(p)
    if Gp is None:
        raise ParameterOutOfRange("no disjoint-rank budget is known for this base")
    l, s = _int(p, "l"), _int(p, "s")
    if s == 1:
        return Gp(d, l)
    return Gp(d, G(d, s * l))


def _ints(p, key) -> list[int]:
    v = p.get(key)
    if not isinstance(v, (list, tuple)) or not v or any(isinstance(x, bool) or not isinstance(x, int) or x < 1 for x in v):
        raise ParameterOutOfRange(f"{key} must be a nonempty list of positive integers")
    return list(v)


def _power_g(p):
    l, D, g = _int(p, "l"), _int(p, "D"), _int(p, "g")
    return l ** (D - 1) * g ** D


REGISTRY: dict[str, tuple[tuple[str, ...], Callable[[dict], int], str]] = {
    "Fpr": (("d", "l", "q"), lambda p: f_pr(_int(p, "d", 2), _int(p, "l"), _int(p, "q", 2)),
            "minor size for partition rank over F_q"),
    "Gpr": (("d", "l", "q"), lambda p: g_pr(_int(p, "d", 2), _int(p, "l"), _int(p, "q", 2), p.get("A")),
            "partition-rank threshold; order 2 only unless A is supplied"),
    "Gprime_tr": (("d", "l"), lambda p: gprime_tr(_int(p, "d", 2), _int(p, "l")),
                  "essential tensor rank forcing disjoint tensor rank l"),
    "F4trp": (("l",), lambda p: trp4(_int(p, "l")), "minor size for order-4 tripartition rank"),
    "G4trp": (("l",), lambda p: trp4(_int(p, "l")), "threshold for order-4 tripartition rank"),
    "F3sr": (("l",), lambda p: f_sr3(_int(p, "l")), "minor size for order-3 slice rank"),
    "G3sr": (("l",), lambda p: g_sr3(_int(p, "l")), "threshold for order-3 slice rank"),
    "F4_1xsr": (("l",), lambda p: f_1xsr4(_int(p, "l")), "minor size for 1-enhanced slice rank"),
    "G4_1xsr": (("l",), lambda p: g_1xsr4(_int(p, "l")), "threshold for 1-enhanced slice rank"),
    "F4pr22": (("l",), lambda p: f_pr22(_int(p, "l")), "minor size for (2,2)-partition rank"),
    "G4pr22": (("l",), lambda p: g_pr22(_int(p, "l")), "threshold for (2,2)-partition rank"),
    "Dtr3": (("l",), lambda p: dtr3(_int(p, "l")), "essential tr forcing disjoint tr l, order 3"),
    "Dsr3": (("l",), lambda p: dsr3(_int(p, "l")), "essential sr forcing disjoint sr l, order 3"),
    "Equiv": (("l", "m"), lambda p: equivalence(_int(p, "l"), _int(p, "m")),
              "R'-rank bound of the equivalence transform"),
    "SliceToTensor": (("m", "r"), lambda p: slice_to_tensor(_int(p, "m"), _int(p, "r")),
                      "tensor-rank bound from slice rank r and slice bound m"),
    "EssEquiv": (("l", "m", "d", "dprime"),
                 lambda p: essential_equivalence(_int(p, "l"), _int(p, "m"), _int(p, "d", 2), _int(p, "dprime")),
                 "essential R'-rank bound of the essential reduction"),
    "EssFlat": (("l", "m"), lambda p: essential_flattening(_int(p, "l"), _int(p, "m")),
                "essential flattening-rank bound, order 3"),
    "EtrSlices": (("d", "l"), lambda p: etr_from_slices(_int(p, "d", 2), _int(p, "l")),
                  "essential tr bound from small essential slice pr"),
    "Fmulti": (("base", "l", "s"), f_multi, "minor size for s tensors"),
    "Gmulti": (("base", "l", "s"), g_multi, "threshold for s tensors"),
    "Hmulti": (("base", "l", "s"), h_multi, "removed-set size for s tensors, disjoint version"),
    "Gprime_multi": (("base", "l", "s"), gprime_multi, "essential threshold for s tensors, disjoint version"),
    "Fproduct": (("l", "fs"), lambda p: product_f(_int(p, "l"), *_ints(p, "fs")),
                 "minor size for a product family from the factor sizes"),
    "Gproduct": (("l", "gs"), lambda p: product_g(_int(p, "l"), *_ints(p, "gs")),
                 "threshold for a product family from the factor thresholds"),
    "Gpower": (("l", "D", "g"), _power_g,
               "threshold for the D-th tensor power of a family with threshold g"),
}

ALIASES = {"F_{4,trp}": "F4trp", "G'_{d,tr}": "Gprime_tr", "F_{d,pr}": "Fpr", "G_{d,pr}": "Gpr"}


def budget_eval(expr: BudgetExpression | str, **params) -> int:
    if isinstance(expr, str):
        expr = BudgetExpression(expr, params)
    name = ALIASES.get(expr.name, expr.name)
    if name not in REGISTRY:
        raise UnknownBudget(f"unknown budget {expr.name!r}")
    _, fn, _ = REGISTRY[name]
    value = fn(dict(expr.params))
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterOutOfRange("budget did not evaluate to an integer")
    return value


def describe() -> dict:
    return {k: {"params": list(v[0]), "description": v[2]} for k, v in REGISTRY.items()}
