"""Named spaces with payoffs on them, shared by the test suite and the command line."""
from __future__ import annotations

import random
from fractions import Fraction

from .filtered_space import RATIONAL, FilteredSpace, build_space, constant_time
from .payoff import ABS_DIFF_F, ABS_TIME_DIFF, W_PROCESS, Payoff, build_payoff, table_payoff
from .strategies import StrategyMap


def tree_spec(grid, branching) -> dict:
    """Instance dict for a tree whose depth-k nodes each get ``branching[k]`` children.

    ``branching[k]`` is either an int (uniform probabilities) or a list of
    probabilities.
    """
    nodes = [{"id": 0, "depth": 0}]
    frontier = [0]
    for k, br in enumerate(branching):
        probs = [Fraction(1, br)] * br if isinstance(br, int) else [Fraction(p) for p in br]
        nxt = []
        for par in frontier:
            for p in probs:
                nid = len(nodes)
                nodes.append({"id": nid, "depth": k + 1, "parent": par, "p": str(p)})
                nxt.append(nid)
        frontier = nxt
    return {"grid": [str(t) for t in grid], "nodes": nodes}


def uniform_grid(n_steps: int, horizon=1) -> list:
    return [Fraction(horizon) * k / n_steps for k in range(n_steps + 1)] if n_steps else [Fraction(horizon)]


def chain(n_steps: int, horizon=1, mode=RATIONAL) -> FilteredSpace:
    """Deterministic space: a single path on a uniform grid."""
    return build_space(tree_spec(uniform_grid(n_steps, horizon), [1] * n_steps), mode)


def binary_tree(depth: int, horizon=1, p="1/2", mode=RATIONAL) -> FilteredSpace:
    p = Fraction(p)
    return build_space(tree_spec(uniform_grid(depth, horizon), [[p, 1 - p]] * depth), mode)


def cex(mode=RATIONAL) -> FilteredSpace:
    """Three-point deterministic grid {0, 1/2, 1}."""
    return chain(2, 1, mode)


def cex_payoff(space: FilteredSpace | None = None) -> Payoff:
    """``|f(s) - f(t)|`` with ``f`` the indicator of ``(T/2, T]``."""
    space = space or cex()
    half = space.grid.horizon / 2
    f_time = [1 if t > half else 0 for t in space.grid.times]
    return build_payoff(space, {"kind": ABS_DIFF_F, "f_time": f_time})


def abs_time_diff(space: FilteredSpace) -> Payoff:
    return build_payoff(space, {"kind": ABS_TIME_DIFF})


def asymmetric_tree(mode=RATIONAL) -> FilteredSpace:
    """Depth-2 tree with uneven branching and probabilities."""
    spec = {
        "grid": ["0", "1/3", "1"],
        "nodes": [
            {"id": 0, "depth": 0},
            {"id": 1, "depth": 1, "parent": 0, "p": "1/3"},
            {"id": 2, "depth": 1, "parent": 0, "p": "2/3"},
            {"id": 3, "depth": 2, "parent": 1, "p": "1/4"},
            {"id": 4, "depth": 2, "parent": 1, "p": "1/4"},
            {"id": 5, "depth": 2, "parent": 1, "p": "1/2"},
            {"id": 6, "depth": 2, "parent": 2, "p": "1"},
        ],
    }
    return build_space(spec, mode)


def random_table_payoff(space: FilteredSpace, seed: int, lo: int = -4, hi: int = 4,
                        denominators=(1, 2, 3)) -> Payoff:
    """Seeded table payoff with small rational entries in ``[lo, hi]``."""
    rng = random.Random(seed)

    def value(s, t, node):
        den = rng.choice(denominators)
        return Fraction(rng.randint(lo * den, hi * den), den)
    return table_payoff(space, value)


def random_walk(space: FilteredSpace, scale=1, seed: int | None = None) -> list:
    """Per-node scaled random walk: up moves add ``+h``, down moves ``-h``.

    ``h = scale * sqrt(dt)`` in float mode; in rational mode ``dt`` must be a
    perfect square so pass ``scale`` already including it.  With ``seed`` the
    step signs are shuffled per node, else child 0 is up.
    """
    rng = random.Random(seed) if seed is not None else None
    dt = space.grid.horizon / max(space.horizon_index, 1)
    h = space.num(scale) * (float(dt) ** 0.5 if space.mode != RATIONAL else 1)
    vals = [space.zero()] * space.n_nodes
    for n in range(1, space.n_nodes):
        par = space.parent[n]
        idx = space.children[par].index(n)
        sign = 1 if idx % 2 == 0 else -1
        if rng is not None and rng.random() < 0.5:
            sign = -sign
        vals[n] = vals[par] + sign * h
    return vals


def w_process_payoff(space: FilteredSpace, seed: int) -> Payoff:
    """Seeded Lipschitz payoff ``W(s, t, f_s, g_t)`` driven by a random walk.

    ``W = a_s s + a_t t + a_x x + a_y y + b |x - y| + c |s - t|`` with linear
    coefficients in ``[-1, 1]`` and kink weights ``b, c`` in ``[1/4, 1]``;
    ``g = f``, so the payoff has a kink on the diagonal ``rho = tau``.
    """
    rng = random.Random(seed)
    coeffs = {k: Fraction(rng.randint(-4, 4), 4) for k in ("s", "t", "x", "y")}
    coeffs["abs_xy"] = Fraction(rng.randint(1, 4), 4)
    coeffs["abs_st"] = Fraction(rng.randint(1, 4), 4)
    f = random_walk(space)
    L = max(abs(coeffs["s"]) + coeffs["abs_st"], abs(coeffs["t"]) + coeffs["abs_st"],
            abs(coeffs["x"]) + coeffs["abs_xy"], abs(coeffs["y"]) + coeffs["abs_xy"])
    return build_payoff(space, {"kind": W_PROCESS, "W": {"linear": coeffs}, "L": L,
                                "f": f, "g": list(f)})


def half_horizon_tau_map(space: FilteredSpace | None = None) -> StrategyMap:
    """Type II tau-map: ``T`` if ``rho <= T/2`` else ``T/2`` (deterministic grids)."""
    from .filtered_space import enumerate_stopping_times

    space = space or cex()
    if not space.is_chain():
        raise ValueError("the hand-written map is defined on deterministic grids")
    times = enumerate_stopping_times(space)
    half = space.grid.horizon / 2
    k_half = space.grid.times.index(half)
    N = space.horizon_index
    index = {st: i for i, st in enumerate(times)}
    table = []
    for st in times:
        image = N if space.grid[st.leaf_depth[0]] <= half else k_half
        table.append(index[constant_time(space, image)])
    return StrategyMap(space, table=table, times=times, description="half-horizon tau-map")


def builtin_fixtures(mode=RATIONAL) -> dict:
    """Named (space, payoff) pairs used by ``verify`` and the acceptance suite."""
    c = cex(mode)
    b1 = binary_tree(1, mode=mode)
    b2 = binary_tree(2, mode=mode)
    asym = asymmetric_tree(mode)
    u4 = chain(4, mode=mode)
    return {
        "CEX/abs_diff_f": cex_payoff(c),
        "CEX/abs_time_diff": abs_time_diff(c),
        "U4/abs_time_diff": abs_time_diff(u4),
        "B1/abs_time_diff": abs_time_diff(b1),
        "B2/abs_time_diff": abs_time_diff(b2),
        "B2/abs_diff_f": build_payoff(b2, {"kind": ABS_DIFF_F, "f": random_walk(b2)}),
        "ASYM/table": random_table_payoff(asym, 1000),
        "B2/w_process": w_process_payoff(b2, 3),
    }
