"""Non-anticipative stopping strategies: maps from stopping times to stopping times.

A map ``m`` is of Type I if for every pair ``s1, s2`` and on every path

    either m(s1) == m(s2) <= s1 ^ s2   or   m(s1) ^ m(s2) > s1 ^ s2

and of Type II with ``<`` and ``>=`` in place of ``<=`` and ``>``.
"""
from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

from .conditional_values import LOWER, UPPER, inner_optimizer, value_lower, value_upper
from .errors import CaseIdentityError
from .filtered_space import (
    DEFAULT_ST_CAP,
    StoppingTime,
    constant_time,
    enumerate_stopping_times,
    expectation,
    from_leaf_depths,
)
from .payoff import Payoff, eval_payoff

TYPE_I = "I"
TYPE_II = "II"
UNCHECKED = "UNCHECKED"
RHO = "RHO"
TAU = "TAU"


class StrategyMap:
    """Total map on stopping times, table-backed or rule-backed.

    Rule-backed maps are evaluated lazily and memoized under a lock.
    """

    def __init__(self, space, fn: Callable[[StoppingTime], StoppingTime] | None = None,
                 table: Sequence[int] | None = None, times: Sequence[StoppingTime] | None = None,
                 declared_type: str = UNCHECKED, description: str = ""):
        if (fn is None) == (table is None):
            raise ValueError("give exactly one of fn or table")
        self.space = space
        self.declared_type = declared_type
        self.description = description
        self._fn = fn
        self._lock = threading.Lock()
        self._memo = {}
        if table is not None:
            if times is None:
                raise ValueError("table-backed maps need the enumeration manifest")
            if len(table) != len(times):
                raise ValueError("table must assign an image to every stopping time")
            self.table = tuple(table)
            self.times = list(times)
            self._index = {st: i for i, st in enumerate(self.times)}
        else:
            self.table = None
            self.times = None

    @property
    def backing(self) -> str:
        return "TABLE" if self.table is not None else "RULE"

    def __call__(self, sigma: StoppingTime) -> StoppingTime:
        if self.table is not None:
            try:
                return self.times[self.table[self._index[sigma]]]
            except KeyError:
                raise ValueError(f"{sigma} is not in this map's domain") from None
        with self._lock:
            hit = self._memo.get(sigma)
        if hit is None:
            hit = self._fn(sigma)
            with self._lock:
                self._memo[sigma] = hit
        return hit

    def as_table(self, times: Sequence[StoppingTime]) -> "StrategyMap":
        index = {st: i for i, st in enumerate(times)}
        table = [index[self(st)] for st in times]
        return StrategyMap(self.space, table=table, times=times,
                           declared_type=self.declared_type, description=self.description)

    def with_type(self, kind: str, cap: int = DEFAULT_ST_CAP) -> "StrategyMap":
        """Copy tagged with ``kind`` after a successful check (raises otherwise)."""
        cex = check_nonanticipativity(self, kind, cap=cap)
        if cex is not None:
            raise ValueError(f"map is not of Type {kind}: {cex}")
        out = StrategyMap.__new__(StrategyMap)
        out.__dict__.update(self.__dict__)
        out._lock = threading.Lock()
        out.declared_type = kind
        return out

    def __repr__(self):
        body = f"table={list(self.table)}" if self.table is not None else self.description
        return f"StrategyMap({self.backing}, type={self.declared_type}, {body})"


def identity_map(space) -> StrategyMap:
    return StrategyMap(space, fn=lambda s: s, description="identity")


def constant_map(space, sigma0: StoppingTime) -> StrategyMap:
    return StrategyMap(space, fn=lambda s: sigma0, description=f"constant {sigma0.short()}")


# ---------------------------------------------------------------------------
# non-anticipativity

@dataclass(frozen=True)
class Counterexample:
    sigma1: StoppingTime
    sigma2: StoppingTime
    leaf: int
    leaf_path: tuple
    image1: int  # stop index of m(sigma1) on the leaf
    image2: int
    meet: int
    equal_clause: bool
    later_clause: bool

    def __str__(self):
        return (f"sigma1={self.sigma1.short()} sigma2={self.sigma2.short()} leaf path "
                f"{self.leaf_path}: m(s1)={self.image1} m(s2)={self.image2} s1^s2={self.meet}, "
                f"equal clause {self.equal_clause}, later clause {self.later_clause}")


def pair_clauses(a1: int, a2: int, m: int, kind: str):
    """Evaluate both clauses of the dichotomy at one leaf (stop indices)."""
    if kind == TYPE_I:
        return a1 == a2 and a1 <= m, min(a1, a2) > m
    if kind == TYPE_II:
        return a1 == a2 and a1 < m, min(a1, a2) >= m
    raise ValueError(f"type must be I or II, got {kind!r}")


def pair_violation(s1: StoppingTime, s2: StoppingTime, i1: StoppingTime, i2: StoppingTime,
                   kind: str):
    """First leaf where the images ``i1 = m(s1)``, ``i2 = m(s2)`` break the condition."""
    for li, (d1, d2, a1, a2) in enumerate(zip(s1.leaf_depth, s2.leaf_depth,
                                              i1.leaf_depth, i2.leaf_depth)):
        m = min(d1, d2)
        eq, later = pair_clauses(a1, a2, m, kind)
        if not (eq or later):
            return li, a1, a2, m, eq, later
    return None


def check_nonanticipativity(strategy: StrategyMap, kind: str, times=None,
                            cap: int = DEFAULT_ST_CAP):
    """Pairwise, pathwise check.  Returns ``None`` if OK, else a :class:`Counterexample`."""
    if times is None:
        times = strategy.times or enumerate_stopping_times(strategy.space, cap)
    images = [strategy(st) for st in times]
    for (i, s1), (j, s2) in itertools.combinations(enumerate(times), 2):
        hit = pair_violation(s1, s2, images[i], images[j], kind)
        if hit is not None:
            li, a1, a2, m, eq, later = hit
            return Counterexample(s1, s2, li, strategy.space.leaf_path[li], a1, a2, m, eq, later)
    return None


@dataclass(frozen=True)
class FixedPointViolation:
    image_T: StoppingTime
    image_of_image: StoppingTime


def fixed_point_check(strategy: StrategyMap):
    """``m(m(T)) == m(T)``; returns ``None`` when it holds."""
    T = constant_time(strategy.space, strategy.space.horizon_index)
    once = strategy(T)
    twice = strategy(once)
    return None if twice == once else FixedPointViolation(once, twice)


# ---------------------------------------------------------------------------
# constructions

def _split_map(U: Payoff, anchor: StoppingTime, side: str, strict_inner: bool, eps, name):
    def apply(arg: StoppingTime) -> StoppingTime:
        inner = inner_optimizer(U, side, strict_inner, arg, eps)
        depths = [a if x >= a else i for x, a, i in
                  zip(arg.leaf_depth, anchor.leaf_depth, inner.leaf_depth)]
        return from_leaf_depths(U.space, depths)
    desc = f"{name}(anchor={anchor.short()}, strict_inner={strict_inner})"
    return StrategyMap(U.space, fn=apply, description=desc)


def build_rho_map(U: Payoff, anchor: StoppingTime, strict_inner: bool, eps=0) -> StrategyMap:
    """``m(tau) = anchor`` on ``{tau >= anchor}``, else the lower inner optimizer of ``tau``.

    With ``strict_inner`` the inner optimizer stops strictly after ``tau``,
    which makes the map Type I; otherwise it is Type II.
    """
    return _split_map(U, anchor, LOWER, strict_inner, eps, "rho_map")


def build_tau_map(U: Payoff, anchor: StoppingTime, strict_inner: bool, eps=0) -> StrategyMap:
    """Mirror of :func:`build_rho_map` with upper inner optimizers."""
    return _split_map(U, anchor, UPPER, strict_inner, eps, "tau_map")


def strategy_game_value(U: Payoff, strategy: StrategyMap, side: str, times=None,
                        cap: int = DEFAULT_ST_CAP):
    """Inner optimum against a fixed map.

    ``RHO``: sup over tau of ``E[U(m(tau), tau)]``;
    ``TAU``: inf over rho of ``E[U(rho, m(rho))]``.
    """
    sp = U.space
    if times is None:
        times = enumerate_stopping_times(sp, cap)
    if side == RHO:
        return max(expectation(sp, eval_payoff(U, strategy(t), t)) for t in times)
    if side == TAU:
        return min(expectation(sp, eval_payoff(U, r, strategy(r))) for r in times)
    raise ValueError(f"side must be RHO or TAU, got {side!r}")


def best_response_to_map(U: Payoff, strategy: StrategyMap, anchor: StoppingTime | None = None,
                         side: str = RHO, cap: int = DEFAULT_ST_CAP, eps=0):
    """Maximizer's constructed response to a rho-map.

    ``tau_m = anchor`` on ``{anchor <= m(anchor)}`` and the strict upper
    optimizer started at ``m(anchor)`` elsewhere.  Without an explicit
    anchor the sup-inf optimizer of the (V1, V2+, LOW) Dynkin game is used.
    Returns ``(tau_m, E[U(m(tau_m), tau_m)])`` after asserting the two case
    identities pathwise.
    """
    if side != RHO:
        raise ValueError("only the rho-player's maps are supported")
    sp = U.space
    if anchor is None:
        from .dynkin import LOW, SUP_INF, DynkinSpec, open_loop_solve
        spec = DynkinSpec(value_lower(U), value_upper(U, strict=True), LOW)
        anchor = open_loop_solve(spec, SUP_INF, cap).optimizer
    rho_hat = strategy(anchor)
    tau2 = inner_optimizer(U, UPPER, True, rho_hat, eps)
    depths = [t if t <= r else q for t, r, q in
              zip(anchor.leaf_depth, rho_hat.leaf_depth, tau2.leaf_depth)]
    tau_m = from_leaf_depths(sp, depths)
    rho_m = strategy(tau_m)
    for li, (t, r) in enumerate(zip(anchor.leaf_depth, rho_hat.leaf_depth)):
        if t <= r:
            ok = rho_m.leaf_depth[li] >= t and tau_m.leaf_depth[li] == t
        else:
            ok = rho_m.leaf_depth[li] == r
        if not ok:
            raise CaseIdentityError(
                f"case identity fails on leaf path {sp.leaf_path[li]}: anchor={t}, "
                f"m(anchor)={r}, tau_m={tau_m.leaf_depth[li]}, m(tau_m)={rho_m.leaf_depth[li]}")
    return tau_m, expectation(sp, eval_payoff(U, rho_m, tau_m))
