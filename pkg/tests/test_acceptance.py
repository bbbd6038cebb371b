"""Acceptance criteria 1-9.

Each criterion runs under its wall-clock budget and records one PASS/FAIL
line, printed in the pytest terminal summary (see ``conftest.py``).  The
module also runs standalone: ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import sys
import time
from fractions import Fraction

import pytest

from stopgame.conditional_values import diagonal_family
from stopgame.dynkin import (
    HIGH,
    INF_SUP,
    LOW,
    SUP_INF,
    DynkinSpec,
    dynkin_closed_loop,
    jj_decomposition,
    open_loop_solve,
    payoff_matrix,
)
from stopgame.filtered_space import FLOAT, enumerate_stopping_times
from stopgame.fixtures import (
    abs_time_diff,
    binary_tree,
    builtin_fixtures,
    cex,
    cex_payoff,
    chain,
    random_table_payoff,
)
from stopgame.oracle import brute_game_values, enumerate_strategy_maps, families, sandwich_report
from stopgame.refinement import refine_abs_time_diff, refine_w_process
from stopgame.strategies import (
    RHO,
    TYPE_I,
    TYPE_II,
    build_rho_map,
    build_tau_map,
    check_nonanticipativity,
    fixed_point_check,
    identity_map,
    strategy_game_value,
)

RESULTS: list[str] = []
N_SEEDS = 20
W_SEED = 0


def _seeded():
    return [(f"B2/seed{s}", random_table_payoff(binary_tree(2), s)) for s in range(N_SEEDS)]


def _all_fixtures():
    return sorted(builtin_fixtures().items())


def _shallow_fixtures():
    return [(k, U) for k, U in _all_fixtures() if U.space.horizon_index <= 2]


def _ordered(U, fams=None):
    fams = fams or families(U)
    for lo, up, tie in itertools.product(("V1", "V1+"), ("V2", "V2+"), (LOW, HIGH)):
        spec = DynkinSpec(fams[lo], fams[up], tie)
        if spec.is_ordered():
            yield spec


def _run(number: int, budget: float, body):
    start = time.perf_counter()
    detail, error = "", None
    try:
        detail = body() or ""
    except AssertionError as exc:
        error = exc
    elapsed = time.perf_counter() - start
    if error is None and elapsed >= budget:
        error = AssertionError(f"took {elapsed:.2f}s, budget {budget}s")
    status = "PASS" if error is None else "FAIL"
    note = detail if error is None else str(error)
    RESULTS.append(f"criterion {number}: {status} ({elapsed:.2f}s < {budget}s) {note}".rstrip())
    if error is not None:
        raise error


# 1 -------------------------------------------------------------------------
def _counterexample():
    gv = brute_game_values(cex_payoff(cex()))
    assert gv.as_tuple() == (1, 0, 0, 1), gv.as_tuple()
    return "(A_upper, A_lower, B_upper, B_lower) = (1, 0, 0, 1)"


def test_criterion_1_counterexample():
    _run(1, 1.0, _counterexample)


# 2 -------------------------------------------------------------------------
def _fixed_point():
    counts = []
    for sp in (cex(), binary_tree(1)):
        n = bad = 0
        for m in enumerate_strategy_maps(sp, TYPE_I):
            n += 1
            bad += fixed_point_check(m) is not None
        assert bad == 0, f"{bad} violations"
        counts.append(n)
    return f"Type I maps checked: {counts[0]} on CEX, {counts[1]} on binary depth 1; 0 violations"


def test_criterion_2_type_i_fixed_point():
    _run(2, 1.0, _fixed_point)


# 3 -------------------------------------------------------------------------
def _sandwich_splitting():
    instances = _all_fixtures() + _seeded()
    instances += [(f"B1/seed{s}", random_table_payoff(binary_tree(1), s)) for s in range(N_SEEDS)]
    nodes = 0
    for name, U in instances:
        f = families(U)
        diag = diagonal_family(U)
        for n in range(U.space.n_nodes):
            assert f["V1"][n] <= diag[n] <= f["V2"][n], (name, n)
            assert f["V1"][n] == min(diag[n], f["V1+"][n]), (name, n)
            assert f["V2"][n] == max(diag[n], f["V2+"][n]), (name, n)
            nodes += 1
    return f"{len(instances)} instances, {nodes} nodes, exact"


def test_criterion_3_diagonal_sandwich_and_splitting():
    _run(3, 10.0, _sandwich_splitting)


# 4 -------------------------------------------------------------------------
def _dynkin_consistency():
    combos = 0
    for name, U in _shallow_fixtures() + _seeded():
        times = enumerate_stopping_times(U.space)
        for spec in _ordered(U):
            closed = dynkin_closed_loop(spec).root_value
            mat = payoff_matrix(spec, times)
            inf_sup = open_loop_solve(spec, INF_SUP, times=times, matrix=mat).value
            sup_inf = open_loop_solve(spec, SUP_INF, times=times, matrix=mat).value
            assert closed == inf_sup == sup_inf, (name, spec.label(), closed, inf_sup, sup_inf)
            combos += 1
    return f"{combos} ordered (lower, upper, tie) combinations agree"


def test_criterion_4_dynkin_consistency():
    _run(4, 30.0, _dynkin_consistency)


# 5 -------------------------------------------------------------------------
def _jj():
    iters = []
    for name, U in _shallow_fixtures() + _seeded():
        for spec in _ordered(U):
            jj = jj_decomposition(spec.lower, spec.upper, spec.tie)
            assert jj.value == dynkin_closed_loop(spec).root_value, (name, spec.label())
            iters.append(jj.iterations)
    return f"{len(iters)} decompositions, iterations {min(iters)}..{max(iters)}"


def test_criterion_5_jj_decomposition():
    _run(5, 30.0, _jj)


# 6 -------------------------------------------------------------------------
def _constructions():
    checked = 0
    for name, U in _shallow_fixtures():
        times = enumerate_stopping_times(U.space)
        for anchor in times:
            for build in (build_rho_map, build_tau_map):
                assert check_nonanticipativity(build(U, anchor, True), TYPE_I, times) is None, \
                    (name, build.__name__, anchor.short(), "strict")
                assert check_nonanticipativity(build(U, anchor, False), TYPE_II, times) is None, \
                    (name, build.__name__, anchor.short(), "non-strict")
                checked += 2
    return f"{checked} constructed maps have their declared type"


def test_criterion_6_construction_validity():
    _run(6, 10.0, _constructions)


# 7 -------------------------------------------------------------------------
def _sandwich_suite():
    n = 0
    for name, U in _all_fixtures() + _seeded():
        rep = sandwich_report(U)
        assert rep.all_pass, (name, [(c.name, c.lhs, c.relation, c.rhs) for c in rep.failures()])
        n += 1
    rep = sandwich_report(cex_payoff())
    s1, s6 = rep.status("S1"), rep.status("S6")
    assert s1.binds and s1.lhs == s1.rhs == 1, s1
    assert s6.binds and s6.lhs == s6.rhs == 0, s6
    return f"S1-S6 and C1-C4 hold on {n} instances; on CEX S1 binds at 1, S6 at 0"


def test_criterion_7_sandwich_suite():
    _run(7, 60.0, _sandwich_suite)


# 8 -------------------------------------------------------------------------
def _non_existence():
    parts = []
    for n in (2, 4):
        U = abs_time_diff(chain(n))
        times = enumerate_stopping_times(U.space)
        delta = Fraction(1, n)
        values = [strategy_game_value(U, m, RHO, times)
                  for m in enumerate_strategy_maps(U.space, TYPE_I, times)]
        assert min(values) > 0, (n, min(values))
        ident = identity_map(U.space)
        assert check_nonanticipativity(ident, TYPE_II, times) is None
        assert strategy_game_value(U, ident, RHO, times) == 0
        assert brute_game_values(U, times=times, quantities=("A_upper",)).A_upper == delta
        assert min(values) == delta
        parts.append(f"N={n}: {len(values)} Type I maps, best {min(values)}")
    return "; ".join(parts) + "; identity (Type II) scores 0"


def test_criterion_8_type_i_non_existence():
    _run(8, 60.0, _non_existence)


# 9 -------------------------------------------------------------------------
def _refinement():
    rows = refine_abs_time_diff(levels=3)
    spreads = [r.spread for r in rows]
    assert all(a > b for a, b in zip(spreads, spreads[1:])), spreads
    for r in rows:
        if r.source == "exhaustive":
            assert r.spread == r.delta and r.A_upper == r.delta, (r.level, r.spread, r.delta)
    w = refine_w_process(depths=(2, 3), seed=W_SEED, mode=FLOAT)
    s2, s3 = w[0].spread, w[1].spread
    assert s3 < s2 - 1e-9, (s2, s3)
    exact = sum(r.source == "exhaustive" for r in rows)
    return (f"|s-t| spreads {', '.join(map(str, spreads))} ({exact}/3 exhaustive); "
            f"W-process seed {W_SEED}: {s2:.6f} -> {s3:.6f}")


def test_criterion_9_refinement():
    _run(9, 300.0, _refinement)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
