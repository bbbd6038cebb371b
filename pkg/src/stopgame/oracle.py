"""Exhaustive ground truth for the strategy games on small trees.

Game values over non-anticipative maps (``m`` ranges over Type I or II):

    A_upper = inf over Type I rho-maps of sup_tau E[U(m(tau), tau)]
    A_lower = sup over Type I tau-maps of inf_rho E[U(rho, m(rho))]
    B_upper, B_lower: the same over Type II maps.

Because the inner sup (inf) splits over table entries, the outer
optimization is a constrained minimax over tables that is solved exactly by
depth-first branch and bound.  :func:`enumerate_strategy_maps` is the
plain generator used to cross-check it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .conditional_values import value_lower, value_upper
from .dynkin import HIGH, INF_SUP, LOW, SUP_INF, DynkinSpec, open_loop_solve, payoff_matrix
from .errors import CapacityError
from .filtered_space import (
    DEFAULT_ST_CAP,
    FilteredSpace,
    count_stopping_times,
    enumerate_stopping_times,
    expectation,
)
from .payoff import Payoff, diagonal, eval_payoff
from .strategies import (
    RHO,
    TAU,
    TYPE_I,
    TYPE_II,
    StrategyMap,
    build_rho_map,
    build_tau_map,
    pair_violation,
    strategy_game_value,
)

DEFAULT_MAP_CAP = 200_000
DEFAULT_SEARCH_CAP = 20_000_000

__all__ = [
    "enumerate_stopping_times", "count_stopping_times", "enumerate_strategy_maps",
    "brute_game_values", "brute_game_values_enumerated", "sandwich_report", "d_values",
    "families", "GameValues", "SandwichReport", "D_VARIANTS",
]


class _Compat:
    """Memoized pairwise check: may ``s_i -> a`` and ``s_j -> b`` coexist?"""

    def __init__(self, times, kind):
        self.times = times
        self.kind = kind
        self._cache = {}

    def __call__(self, i, a, j, b):
        key = (i, a, j, b)
        hit = self._cache.get(key)
        if hit is None:
            t = self.times
            hit = pair_violation(t[i], t[j], t[a], t[b], self.kind) is None
            self._cache[key] = hit
        return hit


def enumerate_strategy_maps(space: FilteredSpace, kind: str, times=None,
                            cap_stopping_times: int = DEFAULT_ST_CAP,
                            cap_maps: int | None = DEFAULT_MAP_CAP):
    """Yield every Type ``kind`` map as a table, in lexicographic table order.

    Partial tables that already violate the condition for a decided pair are
    cut.  Raises :class:`CapacityError` once more than ``cap_maps`` maps
    have been emitted.
    """
    if times is None:
        times = enumerate_stopping_times(space, cap_stopping_times)
    M = len(times)
    compat = _Compat(times, kind)
    table = []
    emitted = 0

    def dfs(i):
        nonlocal emitted
        if i == M:
            emitted += 1
            if cap_maps is not None and emitted > cap_maps:
                raise CapacityError(f"Type {kind} map enumeration", cap_maps)
            yield StrategyMap(space, table=list(table), times=times, declared_type=kind)
            return
        for a in range(M):
            if all(compat(j, table[j], i, a) for j in range(i)):
                table.append(a)
                yield from dfs(i + 1)
                table.pop()

    yield from dfs(0)


def _minimax_table(M, cost, compat, cap, search_cap=DEFAULT_SEARCH_CAP):
    """Minimize ``max_i cost[i][table[i]]`` over compatible tables.

    Returns ``(best, table, evaluated)``.  Exact: a branch is cut only when
    its partial maximum already reaches the incumbent.  ``cap`` bounds
    complete tables scored, ``search_cap`` the partial tables visited.
    """
    order = [sorted(range(M), key=lambda a, i=i: (cost[i][a], a)) for i in range(M)]
    best = math.inf
    best_table = None
    table = []
    evaluated = 0
    visited = 0

    def dfs(i, cur):
        nonlocal best, best_table, evaluated, visited
        visited += 1
        if search_cap is not None and visited > search_cap:
            raise CapacityError("strategy-map search (partial tables)", search_cap)
        if i == M:
            evaluated += 1
            if cap is not None and evaluated > cap:
                raise CapacityError("strategy-map search", cap)
            if cur < best:
                best, best_table = cur, list(table)
            return
        for a in order[i]:
            c = cost[i][a]
            if c >= best:
                break  # candidates are sorted; the rest cannot improve
            if all(compat(j, table[j], i, a) for j in range(i)):
                table.append(a)
                dfs(i + 1, max(cur, c))
                table.pop()

    dfs(0, -math.inf)
    return best, best_table, evaluated


@dataclass
class GameValues:
    A_upper: object
    A_lower: object
    B_upper: object
    B_lower: object
    witnesses: dict = field(repr=False)
    times: list = field(repr=False)
    evaluated: dict = field(default_factory=dict, repr=False)

    def as_tuple(self):
        return (self.A_upper, self.A_lower, self.B_upper, self.B_lower)

    def as_dict(self):
        return {"A_upper": self.A_upper, "A_lower": self.A_lower,
                "B_upper": self.B_upper, "B_lower": self.B_lower}


def payoff_table(U: Payoff, times) -> list:
    """``P[a][b] = E[U(times[a], times[b])]``."""
    sp = U.space
    return [[expectation(sp, eval_payoff(U, r, t)) for t in times] for r in times]


def brute_game_values(U: Payoff, cap_stopping_times: int = DEFAULT_ST_CAP,
                      cap_maps: int | None = DEFAULT_MAP_CAP, times=None,
                      quantities=("A_upper", "A_lower", "B_upper", "B_lower")) -> GameValues:
    """Exact values of the four strategy games with optimal witness maps.

    ``cap_maps`` bounds the number of complete tables scored per quantity.
    Quantities not requested come back as ``None``.
    """
    sp = U.space
    if times is None:
        times = enumerate_stopping_times(sp, cap_stopping_times)
    M = len(times)
    P = payoff_table(U, times)
    # rho side: table entry i is m(tau_i); cost is E[U(m(tau_i), tau_i)]
    rho_cost = [[P[a][i] for a in range(M)] for i in range(M)]
    # tau side: entry i is m(rho_i); maximize min E[U(rho_i, m(rho_i))]
    tau_cost = [[-P[i][a] for a in range(M)] for i in range(M)]
    compat = {TYPE_I: _Compat(times, TYPE_I), TYPE_II: _Compat(times, TYPE_II)}
    spec = {"A_upper": (TYPE_I, RHO), "B_upper": (TYPE_II, RHO),
            "A_lower": (TYPE_I, TAU), "B_lower": (TYPE_II, TAU)}

    values, witnesses, evaluated = {}, {}, {}
    for name in ("A_upper", "A_lower", "B_upper", "B_lower"):
        if name not in quantities:
            values[name] = None
            continue
        kind, side = spec[name]
        cost = rho_cost if side == RHO else tau_cost
        best, table, n = _minimax_table(M, cost, compat[kind], cap_maps)
        values[name] = best if side == RHO else -best
        witnesses[name] = StrategyMap(sp, table=table, times=times, declared_type=kind,
                                      description=f"{name} witness")
        evaluated[name] = n
    return GameValues(values["A_upper"], values["A_lower"], values["B_upper"],
                      values["B_lower"], witnesses, times, evaluated)


def brute_game_values_enumerated(U: Payoff, cap_stopping_times: int = DEFAULT_ST_CAP,
                                 cap_maps: int | None = DEFAULT_MAP_CAP) -> tuple:
    """Same four values by scoring every enumerated map (slow cross-check)."""
    sp = U.space
    times = enumerate_stopping_times(sp, cap_stopping_times)
    out = []
    for kind in (TYPE_I, TYPE_II):
        maps = list(enumerate_strategy_maps(sp, kind, times, cap_maps=cap_maps))
        upper = min(strategy_game_value(U, m, RHO, times) for m in maps)
        lower = max(strategy_game_value(U, m, TAU, times) for m in maps)
        out.append((upper, lower))
    (a_up, a_lo), (b_up, b_lo) = out
    return a_up, a_lo, b_up, b_lo


# ---------------------------------------------------------------------------
# Dynkin variants and the sandwich inequalities

D_VARIANTS = {
    # name: (lower family, upper family, tie, order)
    "V_upper": ("V1", "V2", LOW, INF_SUP),
    "V_lower": ("V1", "V2", LOW, SUP_INF),
    "Vcal_upper": ("V1", "V2", HIGH, INF_SUP),
    "Vcal_lower": ("V1", "V2", HIGH, SUP_INF),
    "D_strict_upper": ("V1+", "V2", HIGH, INF_SUP),
    "D_strict_lower": ("V1", "V2+", LOW, SUP_INF),
}


def families(U: Payoff) -> dict:
    return {"V1": value_lower(U), "V1+": value_lower(U, strict=True),
            "V2": value_upper(U), "V2+": value_upper(U, strict=True)}


def d_values(U: Payoff, cap_stopping_times: int = DEFAULT_ST_CAP, times=None,
             fams=None, with_optimizers=False):
    """Open-loop values of the six Dynkin variants (see ``D_VARIANTS``)."""
    if times is None:
        times = enumerate_stopping_times(U.space, cap_stopping_times)
    fams = fams or families(U)
    out, opt = {}, {}
    matrices = {}
    for name, (lo, up, tie, order) in D_VARIANTS.items():
        key = (lo, up, tie)
        spec = DynkinSpec(fams[lo], fams[up], tie)
        if key not in matrices:
            matrices[key] = payoff_matrix(spec, times)
        res = open_loop_solve(spec, order, times=times, matrix=matrices[key])
        out[name] = res.value
        opt[name] = res.optimizer
    return (out, opt) if with_optimizers else out


@dataclass
class Check:
    name: str
    lhs: object
    relation: str  # "<=" or ">="
    rhs: object
    passed: bool
    binds: bool
    note: str = ""

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


@dataclass
class SandwichReport:
    d_values: dict
    game_values: GameValues
    diag_max: object
    checks: list
    constructed: dict = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def status(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]


def _cmp(sp, lhs, rel, rhs):
    close = sp.isclose(lhs, rhs)
    ok = close or (lhs <= rhs if rel == "<=" else lhs >= rhs)
    return ok, close


def sandwich_report(U: Payoff, cap_stopping_times: int = DEFAULT_ST_CAP,
                    cap_maps: int | None = DEFAULT_MAP_CAP, game_values=None) -> SandwichReport:
    """Evaluate the one-sided bounds S1..S6 plus the construction checks C1..C4.

    C1..C4 compare the constructed strategy maps against the Dynkin values
    they are built from: the strict rho-map anchored at the optimizer of
    ``D_strict_upper`` must score exactly that value, and so on.
    """
    sp = U.space
    times = enumerate_stopping_times(sp, cap_stopping_times)
    gv = game_values or brute_game_values(U, cap_maps=cap_maps, times=times)
    fams = families(U)
    D, opt = d_values(U, times=times, fams=fams, with_optimizers=True)
    diag_max = max(expectation(sp, diagonal(U, s)) for s in times)

    spec_rows = [
        ("S1", gv.A_upper, "<=", D["D_strict_upper"], "Type I construction bound"),
        ("S2a", gv.A_upper, ">=", D["D_strict_lower"], "best-response bound"),
        ("S2b", gv.B_upper, ">=", D["D_strict_lower"], "best-response bound (Type II)"),
        ("S3", gv.B_upper, "<=", D["Vcal_upper"], "non-strict construction"),
        ("S4", gv.B_lower, ">=", D["V_lower"], "symmetric non-strict construction"),
        ("S5", gv.A_lower, ">=", D["D_strict_lower"], "strict tau-map construction"),
        ("S6", gv.A_lower, "<=", diag_max, "fixed point of Type I maps"),
    ]

    constructions = {
        "C1": (build_rho_map(U, opt["D_strict_upper"], True), RHO, "D_strict_upper", TYPE_I),
        "C2": (build_rho_map(U, opt["Vcal_upper"], False), RHO, "Vcal_upper", TYPE_II),
        "C3": (build_tau_map(U, opt["D_strict_lower"], True), TAU, "D_strict_lower", TYPE_I),
        "C4": (build_tau_map(U, opt["V_lower"], False), TAU, "V_lower", TYPE_II),
    }
    constructed = {}
    for name, (m, side, dname, kind) in constructions.items():
        val = strategy_game_value(U, m, side, times)
        constructed[name] = {"value": val, "target": D[dname], "type": kind, "map": m}
        spec_rows.append((name, val, "<=" if side == RHO else ">=", D[dname],
                          f"constructed Type {kind} map reaches {dname}"))

    checks = []
    for name, lhs, rel, rhs, note in spec_rows:
        ok, close = _cmp(sp, lhs, rel, rhs)
        if name.startswith("C"):
            ok = close  # constructions must hit their Dynkin value exactly
        checks.append(Check(name, lhs, rel, rhs, ok, close, note))
    return SandwichReport(D, gv, diag_max, checks, constructed)
