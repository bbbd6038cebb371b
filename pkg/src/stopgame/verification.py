"""Invariant suite run by ``stopgame verify`` and the acceptance tests."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .conditional_values import diagonal_family
from .dynkin import (
    HIGH,
    INF_SUP,
    LOW,
    SUP_INF,
    DynkinSpec,
    dynkin_closed_loop,
    dynkin_saddle,
    jj_decomposition,
    open_loop_solve,
    payoff_matrix,
)
from .errors import CapacityError
from .filtered_space import DEFAULT_ST_CAP, enumerate_stopping_times
from .oracle import DEFAULT_MAP_CAP, enumerate_strategy_maps, families, sandwich_report
from .payoff import Payoff
from .strategies import (
    TYPE_I,
    TYPE_II,
    build_rho_map,
    build_tau_map,
    check_nonanticipativity,
    fixed_point_check,
)


@dataclass
class Result:
    instance: str
    check: str
    passed: bool
    detail: str = ""

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def family_checks(name: str, U: Payoff, fams=None) -> list:
    """Diagonal sandwich and the min/max splitting identities, nodewise."""
    sp = U.space
    fams = fams or families(U)
    diag = diagonal_family(U)
    v1, v1p, v2, v2p = fams["V1"], fams["V1+"], fams["V2"], fams["V2+"]
    bad_sandwich = [n for n in range(sp.n_nodes) if not v1[n] <= diag[n] <= v2[n]]
    bad_split = [n for n in range(sp.n_nodes)
                 if v1[n] != min(diag[n], v1p[n]) or v2[n] != max(diag[n], v2p[n])]
    return [
        Result(name, "diagonal sandwich", not bad_sandwich, f"bad nodes {bad_sandwich}"),
        Result(name, "splitting identities", not bad_split, f"bad nodes {bad_split}"),
    ]


def dynkin_checks(name: str, U: Payoff, fams=None, times=None, with_saddle=True) -> list:
    """Closed loop vs both open-loop orders vs J/J' for every ordered combination."""
    fams = fams or families(U)
    times = times or enumerate_stopping_times(U.space)
    out = []
    for lo, up, tie in itertools.product(("V1", "V1+"), ("V2", "V2+"), (LOW, HIGH)):
        spec = DynkinSpec(fams[lo], fams[up], tie)
        if not spec.is_ordered():
            continue
        label = spec.label()
        closed = dynkin_closed_loop(spec).root_value
        mat = payoff_matrix(spec, times)
        inf_sup = open_loop_solve(spec, INF_SUP, times=times, matrix=mat).value
        sup_inf = open_loop_solve(spec, SUP_INF, times=times, matrix=mat).value
        out.append(Result(name, f"closed=open {label}", closed == inf_sup == sup_inf,
                          f"closed {closed}, inf-sup {inf_sup}, sup-inf {sup_inf}"))
        jj = jj_decomposition(fams[lo], fams[up], tie)
        out.append(Result(name, f"J-J' {label}", jj.value == closed,
                          f"J-J' {jj.value} vs {closed} after {jj.iterations} iterations"))
        if with_saddle:
            try:
                dynkin_saddle(spec)
                out.append(Result(name, f"saddle {label}", True))
            except AssertionError as exc:
                out.append(Result(name, f"saddle {label}", False, str(exc)))
    return out


def construction_checks(name: str, U: Payoff, times=None) -> list:
    """Strict constructions are Type I, non-strict ones Type II, for every anchor."""
    times = times or enumerate_stopping_times(U.space)
    failures = []
    for anchor in times:
        for build in (build_rho_map, build_tau_map):
            for strict, kind in ((True, TYPE_I), (False, TYPE_II)):
                cex = check_nonanticipativity(build(U, anchor, strict), kind, times)
                if cex is not None:
                    failures.append(f"{build.__name__}(anchor={anchor.short()}, "
                                    f"strict={strict}): {cex}")
    return [Result(name, "construction types", not failures, "; ".join(failures[:3]))]


def fixed_point_checks(name: str, space, times=None, cap_maps=DEFAULT_MAP_CAP) -> list:
    times = times or enumerate_stopping_times(space)
    bad = 0
    count = 0
    for m in enumerate_strategy_maps(space, TYPE_I, times, cap_maps=cap_maps):
        count += 1
        if fixed_point_check(m) is not None:
            bad += 1
    return [Result(name, "Type I fixed point", bad == 0, f"{bad} violations in {count} maps")]


def sandwich_checks(name: str, U: Payoff, cap_maps=DEFAULT_MAP_CAP):
    rep = sandwich_report(U, cap_maps=cap_maps)
    out = [Result(name, c.name, c.passed, f"{c.lhs} {c.relation} {c.rhs} ({c.note})")
           for c in rep.checks]
    return out, rep


def verify_instance(name: str, U: Payoff, cap_stopping_times=DEFAULT_ST_CAP,
                    cap_maps=DEFAULT_MAP_CAP, fixed_point=True) -> list:
    times = enumerate_stopping_times(U.space, cap_stopping_times)
    fams = families(U)
    results = family_checks(name, U, fams)
    results += dynkin_checks(name, U, fams, times)
    results += construction_checks(name, U, times)
    results += sandwich_checks(name, U, cap_maps)[0]
    if fixed_point:
        try:
            results += fixed_point_checks(name, U.space, times, cap_maps)
        except CapacityError as exc:
            results.append(Result(name, "Type I fixed point", True, f"skipped: {exc}"))
    return results
