"""Biadmissible payoff families ``U(rho, tau)`` on a finite filtered space.

A payoff is tabulated over its full evaluation domain: every triple
``(s, t, node)`` with ``depth(node) == max(s, t)``.  Here ``s`` is the grid
index at which the first player (rho) stops and ``t`` the index for the
second player (tau).  Measurability with respect to the sigma-algebra at
``rho v tau`` is therefore structural: the value is a function of the
atom ``node`` only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .errors import ValidationError
from .filtered_space import FilteredSpace, StoppingTime, to_fraction

TABLE = "table"
W_PROCESS = "w_process"
ABS_DIFF_F = "abs_diff_f"
ABS_TIME_DIFF = "abs_time_diff"
UTILITY_SPREAD = "utility_spread"
KINDS = (TABLE, W_PROCESS, ABS_DIFF_F, ABS_TIME_DIFF, UTILITY_SPREAD)


@dataclass(frozen=True, eq=False)
class Payoff:
    kind: str
    space: FilteredSpace
    table: dict = field(repr=False)
    bound: object
    lipschitz: object = None
    params: dict = field(default_factory=dict, repr=False)

    def __call__(self, s: int, t: int, node: int):
        try:
            return self.table[(s, t, node)]
        except KeyError:
            raise ValueError(
                f"({s}, {t}, {node}) is outside the payoff domain "
                f"(node depth must equal max(s, t))") from None

    def domain(self):
        return iter(self.table)

    def shifted(self, c) -> "Payoff":
        c = self.space.num(c)
        table = {k: v + c for k, v in self.table.items()}
        return Payoff(TABLE, self.space, table, _bound(table), None, {"shift_of": self.kind})


def evaluation_domain(space: FilteredSpace):
    """All ``(s, t, node)`` triples with ``depth(node) == max(s, t)``."""
    for node in range(space.n_nodes):
        d = space.depth[node]
        for s in range(d + 1):
            yield (s, d, node)
        for t in range(d):
            yield (d, t, node)


def _bound(table):
    return max((abs(v) for v in table.values()), default=0)


def _per_node(space: FilteredSpace, values, name: str, maturity=None) -> tuple:
    """Normalize an adapted process given per node (list by source id or dict).

    With ``maturity`` set, nodes deeper than that index take their
    ancestor's value (constant extension past the maturity).
    """
    if values is None:
        raise ValidationError(f"payoff needs process table {name!r}")
    if callable(values):
        out = [values(node) for node in range(space.n_nodes)]
    else:
        lookup = values if isinstance(values, dict) else dict(enumerate(values))
        out = []
        for node, src in enumerate(space.source_ids):
            d = space.depth[node]
            if maturity is not None and d > maturity:
                out.append(None)
                continue
            key = src if src in lookup else str(src)
            if key not in lookup or lookup[key] is None:
                raise ValidationError(f"process {name!r} has no value", node=src)
            out.append(lookup[key])
    if maturity is not None:
        for node in range(space.n_nodes):
            if space.depth[node] > maturity:
                out[node] = out[space.ancestor(node, maturity)]
    return tuple(space.num(v) for v in out)


def _per_time(space: FilteredSpace, values, name: str) -> tuple:
    if len(values) != space.horizon_index + 1:
        raise ValidationError(f"{name!r} needs one value per grid point")
    vals = [space.num(v) for v in values]
    return tuple(vals[space.depth[n]] for n in range(space.n_nodes))


def _process(space, spec, name):
    if f"{name}_time" in spec:
        return _per_time(space, spec[f"{name}_time"], name)
    return _per_node(space, spec.get(name), name, spec.get(f"maturity_{name}"))


def _linear_w(space, coeffs):
    keys = ("s", "t", "x", "y", "abs_xy", "abs_st", "c")
    unknown = set(coeffs) - set(keys)
    if unknown:
        raise ValidationError(f"unknown linear W coefficients {sorted(unknown)}")
    a = {k: space.num(coeffs.get(k, 0)) for k in keys}

    def W(s, t, x, y):
        return (a["s"] * s + a["t"] * t + a["x"] * x + a["y"] * y
                + a["abs_xy"] * abs(x - y) + a["abs_st"] * abs(s - t) + a["c"])
    return W


def _table_w(space, entries):
    tab = {}
    for e in entries:
        key = tuple(to_fraction(e[k]) for k in ("s", "t", "x", "y"))
        tab[key] = space.num(e["v"])

    def W(s, t, x, y):
        key = tuple(to_fraction(v) for v in (s, t, x, y))
        if key not in tab:
            raise ValidationError(f"W table has no entry for (s, t, x, y) = {key}")
        return tab[key]
    return W


def _utility(space, spec):
    if callable(spec):
        return spec
    if "linear" in spec:
        a = space.num(spec["linear"])
        return lambda x: a * x
    for key in ("table", "piecewise_linear"):
        if key in spec:
            pts = sorted((to_fraction(x), space.num(u)) for x, u in spec[key])
            if any(u2 < u1 for (_, u1), (_, u2) in zip(pts, pts[1:])):
                raise ValidationError("utility table must be non-decreasing")
            break
    else:
        raise ValidationError("utility needs 'table', 'piecewise_linear' or 'linear'")
    xs = [x for x, _ in pts]

    if key == "table":
        lookup = {x: u for x, u in pts}

        def utility(x):
            x = to_fraction(x)
            if x not in lookup:
                raise ValidationError(f"utility table does not cover {x}")
            return lookup[x]
        return utility

    def utility(x):
        fx = to_fraction(x)
        if not xs[0] <= fx <= xs[-1]:
            raise ValidationError(f"utility knots do not cover {fx}")
        for (x0, u0), (x1, u1) in zip(pts, pts[1:]):
            if x0 <= fx <= x1:
                w = space.num((fx - x0) / (x1 - x0))
                return u0 + w * (u1 - u0)
        return pts[0][1]
    return utility


def build_payoff(space: FilteredSpace, spec: dict) -> Payoff:
    """Build a :class:`Payoff` from a JSON-style description.

    Kinds and their parameters:

    * ``table``: ``entries`` list of ``{"s", "t", "node", "v"}`` covering the
      whole domain (node ids as in the instance file).  ``constant`` with
      ``value`` is shorthand for a full table.
    * ``abs_diff_f``: ``|f(rho) - f(tau)|`` with adapted ``f``.
    * ``abs_time_diff``: ``|rho - tau|`` in time units.
    * ``w_process``: ``W(rho, tau, f_rho, g_tau)`` with ``W`` a callable, a
      ``linear`` coefficient dict or an ``entries`` table, and Lipschitz
      constant ``L``.
    * ``utility_spread``: ``u(f_rho - g_tau)`` for a monotone utility ``u``.

    Processes ``f``/``g`` are per-node (list indexed by node id, or dict);
    ``f_time``/``g_time`` give one value per grid point instead, and
    ``maturity_f``/``maturity_g`` freeze a process after that grid index.
    """
    kind = spec.get("kind")
    times = space.grid.times
    tnum = [space.num(t) for t in times]
    table = {}
    lipschitz = None
    params = dict(spec)

    if kind == "constant":
        c = space.num(spec["value"])
        table = {key: c for key in evaluation_domain(space)}
        kind = TABLE
    elif kind == TABLE:
        src_to_node = {src: i for i, src in enumerate(space.source_ids)}
        for e in spec.get("entries", ()):
            if e["node"] not in src_to_node:
                raise ValidationError("payoff entry for unknown node", node=e["node"])
            node = src_to_node[e["node"]]
            key = (int(e["s"]), int(e["t"]), node)
            if max(key[0], key[1]) != space.depth[node]:
                raise ValidationError(
                    f"entry (s={key[0]}, t={key[1]}) does not match node depth", node=e["node"])
            table[key] = space.num(e["v"])
        for key in evaluation_domain(space):
            if key not in table:
                s, t, node = key
                raise ValidationError(f"payoff table has no entry for s={s}, t={t}",
                                      node=space.source_ids[node])
    elif kind == ABS_DIFF_F:
        f = _process(space, spec, "f")
        for s, t, node in evaluation_domain(space):
            table[(s, t, node)] = abs(f[space.ancestor(node, s)] - f[space.ancestor(node, t)])
    elif kind == ABS_TIME_DIFF:
        for s, t, node in evaluation_domain(space):
            table[(s, t, node)] = abs(tnum[s] - tnum[t])
    elif kind == W_PROCESS:
        W = spec.get("W")
        if W is None or "L" not in spec:
            raise ValidationError("w_process payoff needs 'W' and 'L'")
        if not callable(W):
            if "linear" in W:
                W = _linear_w(space, W["linear"])
            elif "entries" in W:
                W = _table_w(space, W["entries"])
            else:
                raise ValidationError("W needs 'linear' or 'entries'")
        f = _process(space, spec, "f")
        g = _process(space, spec, "g")
        lipschitz = space.num(spec["L"])
        for s, t, node in evaluation_domain(space):
            x = f[space.ancestor(node, s)]
            y = g[space.ancestor(node, t)]
            table[(s, t, node)] = space.num(W(tnum[s], tnum[t], x, y))
        params.update(_f=f, _g=g)
    elif kind == UTILITY_SPREAD:
        f = _process(space, spec, "f")
        g = _process(space, spec, "g")
        u = _utility(space, spec.get("utility", {"linear": 1}))
        for s, t, node in evaluation_domain(space):
            diff = f[space.ancestor(node, s)] - g[space.ancestor(node, t)]
            table[(s, t, node)] = space.num(u(diff))
    else:
        raise ValidationError(f"unknown payoff kind {kind!r}")

    return Payoff(kind, space, table, _bound(table), lipschitz, params)


def table_payoff(space: FilteredSpace, fn: Callable[[int, int, int], object]) -> Payoff:
    """Tabulate an arbitrary ``fn(s, t, node)`` over the evaluation domain."""
    table = {key: space.num(fn(*key)) for key in evaluation_domain(space)}
    return Payoff(TABLE, space, table, _bound(table))


def lipschitz_certificate(U: Payoff):
    """Check the W-process Lipschitz bound on every pair of domain points.

    Returns ``(ok, worst)`` where ``worst`` is the largest observed ratio
    ``|dU| / (|ds| + |dt| + |df| + |dg|)`` (``None`` if never defined).
    """
    if U.kind != W_PROCESS:
        raise ValueError("Lipschitz certificates exist only for w_process payoffs")
    sp = U.space
    f, g = U.params["_f"], U.params["_g"]
    tnum = [sp.num(t) for t in sp.grid.times]
    points = {}
    for (s, t, node), v in U.table.items():
        key = (tnum[s], tnum[t], f[sp.ancestor(node, s)], g[sp.ancestor(node, t)])
        points[key] = v
    worst = None
    ok = True
    for (p1, v1), (p2, v2) in itertools.combinations(points.items(), 2):
        dist = sum(abs(a - b) for a, b in zip(p1, p2))
        diff = abs(v1 - v2)
        if dist == 0:
            ok = ok and sp.isclose(diff, 0)
            continue
        ratio = diff / dist
        worst = ratio if worst is None or ratio > worst else worst
        if diff > U.lipschitz * dist and not sp.isclose(diff, U.lipschitz * dist):
            ok = False
    return ok, worst


def eval_payoff(U: Payoff, rho: StoppingTime, tau: StoppingTime) -> tuple:
    """Leaf-indexed ``U(rho, tau)``."""
    sp = U.space
    out = []
    for li, (s, t) in enumerate(zip(rho.leaf_depth, tau.leaf_depth)):
        node = sp.leaf_path[li][max(s, t)]
        out.append(U.table[(s, t, node)])
    return tuple(out)


def diagonal(U: Payoff, sigma: StoppingTime) -> tuple:
    return eval_payoff(U, sigma, sigma)


def diag_at(U: Payoff, node: int):
    """``U(T_n, T_n)`` at ``node`` where ``T_n`` is the node's own time."""
    d = U.space.depth[node]
    return U.table[(d, d, node)]
