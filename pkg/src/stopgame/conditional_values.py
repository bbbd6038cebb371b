"""Conditional value families of the inner stopping problems.

For each node ``a`` at depth ``d`` the lower family is the best the
minimizer can do by stopping at or after ``a`` against an opponent frozen
at ``d``; the upper family is the mirror problem for the maximizer:

    lower(a) = min over rho >= d of E_a[U(rho, d)]
    upper(a) = max over tau >= d of E_a[U(d, tau)]

The strict variants restrict to stopping strictly after ``d`` (with the
horizon convention that only ``T`` itself is strictly after ``T``).
"""
from __future__ import annotations

from dataclasses import dataclass

from .filtered_space import FilteredSpace, StoppingTime, validate_stopping_time
from .payoff import Payoff, diag_at

LOWER = "LOWER"
UPPER = "UPPER"


@dataclass(frozen=True, eq=False)
class NodeValueFamily:
    values: tuple
    side: str
    strict: bool
    space: FilteredSpace

    def __getitem__(self, node):
        return self.values[node]

    def __len__(self):
        return len(self.values)

    def at(self, sigma: StoppingTime) -> tuple:
        """Leaf-indexed family value at ``sigma``."""
        return tuple(self.values[n] for n in sigma.leaf_node)

    def shifted(self, c) -> "NodeValueFamily":
        return NodeValueFamily(tuple(v + c for v in self.values), self.side, self.strict, self.space)

    @property
    def name(self) -> str:
        base = "V1" if self.side == LOWER else "V2"
        return base + ("+" if self.strict else "")

    def __repr__(self):
        return f"NodeValueFamily({self.name}, {list(map(str, self.values))})"


def _reward(U: Payoff, side: str, frozen: int, node: int):
    d = U.space.depth[node]
    return U(d, frozen, node) if side == LOWER else U(frozen, d, node)


def _snell(U: Payoff, side: str, frozen: int, root: int, eps=0):
    """Backward induction on the subtree below ``root``.

    Returns node-keyed dicts ``(S, cont, stop)``; ``stop`` records the
    first-optimal decision.  ``eps`` widens the stop
    test so a near-optimal stop is taken early (inexact optimizers).
    """
    sp = U.space
    better = min if side == LOWER else max
    S, cont, stop = {}, {}, {}
    for m in reversed(sp.subtree(root)):
        r = _reward(U, side, frozen, m)
        kids = sp.children[m]
        if not kids:
            S[m], stop[m] = r, True
            continue
        c = sp.zero()
        for k in kids:
            c += sp.branch_prob[k] * S[k]
        cont[m] = c
        S[m] = better(r, c)
        stop[m] = r <= c + eps if side == LOWER else r >= c - eps
    return S, cont, stop


def _family(U: Payoff, side: str, strict: bool) -> NodeValueFamily:
    sp = U.space
    values = []
    for a in range(sp.n_nodes):
        d = sp.depth[a]
        S, cont, _ = _snell(U, side, d, a)
        if strict and sp.children[a]:
            values.append(cont[a])
        else:
            values.append(S[a])
    return NodeValueFamily(tuple(values), side, strict, sp)


def value_lower(U: Payoff, strict: bool = False) -> NodeValueFamily:
    """Lower family ``V1`` (or ``V1+`` with ``strict``)."""
    return _family(U, LOWER, strict)


def value_upper(U: Payoff, strict: bool = False) -> NodeValueFamily:
    """Upper family ``V2`` (or ``V2+`` with ``strict``)."""
    return _family(U, UPPER, strict)


def diagonal_family(U: Payoff) -> tuple:
    return tuple(diag_at(U, n) for n in range(U.space.n_nodes))


def inner_optimizer(U: Payoff, side: str, strict: bool, base: StoppingTime,
                    eps=0) -> StoppingTime:
    """Attained optimizer of the inner problem started at ``base``.

    On each stop node of ``base`` the Snell recursion is run with the
    opponent frozen there, and the optimizer stops at the earliest node where
    stopping is optimal.  With ``strict`` it never stops on ``base`` itself
    except at the horizon.  A positive ``eps`` accepts stops that are at most
    ``eps`` worse than continuing at each step.
    """
    sp = U.space
    labels = [False] * sp.n_nodes
    for a in base.stop_nodes:
        d = sp.depth[a]
        _, _, stop = _snell(U, side, d, a, eps)
        frontier = list(sp.children[a]) if strict and sp.children[a] else [a]
        while frontier:
            m = frontier.pop()
            if stop[m]:
                labels[m] = True
            else:
                frontier.extend(sp.children[m])
    return validate_stopping_time(sp, labels)
