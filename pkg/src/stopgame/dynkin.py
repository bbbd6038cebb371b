"""Dynkin games built from a lower and an upper value family.

The maximizer picks ``tau`` and the minimizer picks ``rho``.  If ``tau``
stops first the maximizer receives ``lower(tau)``; if ``rho`` stops first
it receives ``upper(rho)``.  Simultaneous stopping pays ``lower`` under the
LOW convention and ``upper`` under HIGH.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .conditional_values import NodeValueFamily
from .errors import ConvergenceError, OrderingError
from .filtered_space import (
    DEFAULT_ST_CAP,
    FilteredSpace,
    StoppingTime,
    enumerate_stopping_times,
    expectation,
    validate_stopping_time,
)

LOW = "LOW"
HIGH = "HIGH"
INF_SUP = "INF_SUP"
SUP_INF = "SUP_INF"


@dataclass(frozen=True)
class DynkinSpec:
    lower: NodeValueFamily
    upper: NodeValueFamily
    tie: str = LOW

    def __post_init__(self):
        if self.tie not in (LOW, HIGH):
            raise ValueError(f"tie must be LOW or HIGH, got {self.tie!r}")
        if self.lower.space is not self.upper.space:
            raise ValueError("families live on different spaces")

    @property
    def space(self) -> FilteredSpace:
        return self.lower.space

    def is_ordered(self) -> bool:
        return all(lo <= up for lo, up in zip(self.lower.values, self.upper.values))

    def label(self) -> str:
        return f"({self.lower.name},{self.upper.name},{self.tie})"


@dataclass(frozen=True)
class DynkinSolution:
    value: tuple
    root_value: object
    tau_star: StoppingTime
    rho_star: StoppingTime
    stop_regions: tuple  # per node: subset of {"tau", "rho"} as a string


def payoff_rv(spec: DynkinSpec, rho: StoppingTime, tau: StoppingTime) -> tuple:
    """Leaf-indexed game payoff for the pair ``(rho, tau)``."""
    out = []
    for r, t, rn, tn in zip(rho.leaf_depth, tau.leaf_depth, rho.leaf_node, tau.leaf_node):
        tau_first = t <= r if spec.tie == LOW else t < r
        out.append(spec.lower[tn] if tau_first else spec.upper[rn])
    return tuple(out)


def dynkin_closed_loop(spec: DynkinSpec) -> DynkinSolution:
    sp = spec.space
    lo, up = spec.lower.values, spec.upper.values
    for n in range(sp.n_nodes):
        if lo[n] > up[n]:
            raise OrderingError(n, lo[n], up[n])

    value = [None] * sp.n_nodes
    for n in reversed(range(sp.n_nodes)):
        kids = sp.children[n]
        if not kids:
            value[n] = lo[n] if spec.tie == LOW else up[n]
            continue
        c = sp.zero()
        for k in kids:
            c += sp.branch_prob[k] * value[k]
        value[n] = min(max(c, lo[n]), up[n])

    tau_lab = [False] * sp.n_nodes
    rho_lab = [False] * sp.n_nodes
    regions = []
    for n in range(sp.n_nodes):
        leaf = not sp.children[n]
        t_stop = leaf or sp.isclose(value[n], lo[n])
        r_stop = leaf or sp.isclose(value[n], up[n])
        tau_lab[n] = t_stop
        rho_lab[n] = r_stop
        regions.append(("tau" if t_stop else "") + ("," if t_stop and r_stop else "")
                       + ("rho" if r_stop else ""))
    return DynkinSolution(
        value=tuple(value),
        root_value=value[0],
        tau_star=validate_stopping_time(sp, tau_lab),
        rho_star=validate_stopping_time(sp, rho_lab),
        stop_regions=tuple(regions),
    )


@dataclass
class OpenLoopResult:
    value: object
    order: str
    optimizer: StoppingTime  # rho for INF_SUP, tau for SUP_INF
    matrix: list = field(repr=False)  # matrix[r][t] = E[payoff(rho_r, tau_t)]
    times: list = field(repr=False)


def payoff_matrix(spec: DynkinSpec, times: list) -> list:
    sp = spec.space
    return [[expectation(sp, payoff_rv(spec, r, t)) for t in times] for r in times]


def open_loop_solve(spec: DynkinSpec, order: str, cap: int = DEFAULT_ST_CAP,
                    times: list | None = None, matrix: list | None = None) -> OpenLoopResult:
    """Exhaustive pure-strategy inf-sup or sup-inf with the first optimal witness."""
    if times is None:
        times = enumerate_stopping_times(spec.space, cap)
    if matrix is None:
        matrix = payoff_matrix(spec, times)
    if order == INF_SUP:
        worst = [max(row) for row in matrix]
        best = min(worst)
        idx = worst.index(best)
    elif order == SUP_INF:
        guaranteed = [min(matrix[r][t] for r in range(len(times))) for t in range(len(times))]
        best = max(guaranteed)
        idx = guaranteed.index(best)
    else:
        raise ValueError(f"unknown order {order!r}")
    return OpenLoopResult(best, order, times[idx], matrix, times)


def dynkin_open_loop(spec: DynkinSpec, order: str, cap: int = DEFAULT_ST_CAP):
    return open_loop_solve(spec, order, cap).value


@dataclass(frozen=True)
class SaddleCertificate:
    value: object
    best_tau_deviation: object  # max over tau of E[R(rho*, tau)]
    best_rho_deviation: object  # min over rho of E[R(rho, tau*)]
    n_deviations: int

    @property
    def ok(self) -> bool:
        return self.best_tau_deviation <= self.value <= self.best_rho_deviation


def dynkin_saddle(spec: DynkinSpec, cap: int = DEFAULT_ST_CAP):
    """Closed-loop saddle pair checked against every enumerated deviation.

    Returns ``(rho_star, tau_star, certificate)``; raises ``AssertionError``
    if some deviation is profitable.
    """
    sol = dynkin_closed_loop(spec)
    sp = spec.space
    times = enumerate_stopping_times(sp, cap)
    v = expectation(sp, payoff_rv(spec, sol.rho_star, sol.tau_star))
    tau_dev = max(expectation(sp, payoff_rv(spec, sol.rho_star, t)) for t in times)
    rho_dev = min(expectation(sp, payoff_rv(spec, r, sol.tau_star)) for r in times)
    cert = SaddleCertificate(v, tau_dev, rho_dev, 2 * len(times))
    if not cert.ok:
        raise AssertionError(f"saddle inequalities fail: {cert}")
    return sol.rho_star, sol.tau_star, cert


@dataclass(frozen=True)
class JJResult:
    J: tuple
    J_prime: tuple
    value: object
    iterations: int
    shift: object


def _snell_sup(sp: FilteredSpace, obstacle: list, terminal: list) -> list:
    out = [None] * sp.n_nodes
    for n in reversed(range(sp.n_nodes)):
        kids = sp.children[n]
        if not kids:
            out[n] = terminal[n]
            continue
        c = sp.zero()
        for k in kids:
            c += sp.branch_prob[k] * out[k]
        out[n] = max(obstacle[n], c)
    return out


def jj_decomposition(v1: NodeValueFamily, v2: NodeValueFamily, tie: str = LOW,
                     max_iter: int | None = None) -> JJResult:
    """Fixed-point iteration for a pair (J, J') whose root difference is the game value.

    ``J = Snell(J' + v1)`` and ``J' = Snell((J - v2)^+)`` after shifting both
    families by ``c = max(0, -min)`` so that every obstacle is nonnegative.
    On leaves the game pays the tie-selected family, so the terminal layer
    is ``J = J' + xi`` and ``J' = (J - xi)^+``.  ``J(root) - J'(root)`` is the
    value of the shifted game; the returned ``value`` has the shift removed.
    """
    sp = v1.space
    n = sp.n_nodes
    lowest = min(min(v1.values), min(v2.values))
    c = max(sp.zero(), -lowest)
    x = [v + c for v in v1.values]
    y = [v + c for v in v2.values]
    xi = x if tie == LOW else y
    if max_iter is None:
        max_iter = 10 * n

    J = [sp.zero()] * n
    Jp = [sp.zero()] * n
    zero = sp.zero()
    for it in range(1, max_iter + 1):
        J_new = _snell_sup(sp, [Jp[m] + x[m] for m in range(n)],
                           [Jp[m] + xi[m] for m in range(n)])
        Jp_new = _snell_sup(sp, [max(J[m] - y[m], zero) for m in range(n)],
                            [max(J[m] - xi[m], zero) for m in range(n)])
        residual = max(max(abs(a - b) for a, b in zip(J, J_new)),
                       max(abs(a - b) for a, b in zip(Jp, Jp_new)))
        J, Jp = J_new, Jp_new
        if residual == 0 or (sp.mode != "rational" and residual < 1e-12):
            return JJResult(tuple(J), tuple(Jp), J[0] - Jp[0] - c, it, c)
    raise ConvergenceError(max_iter, residual)
