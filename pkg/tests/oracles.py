"""Independent brute-force oracles.

These work directly on leaf paths and raw stop-depth vectors and share no
code with the backward inductions in the package beyond space construction
and payoff lookup.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def leaf_paths_under(space, node):
    d = space.depth[node]
    return [li for li, path in enumerate(space.leaf_path) if path[d] == node]


def stop_vectors(space, node, min_depth):
    """All stop-depth vectors (one per leaf under ``node``) of stopping rules
    that never stop before ``min_depth`` inside the subtree of ``node``."""
    d = space.depth[node]
    kids = space.children[node]
    leaves = leaf_paths_under(space, node)
    out = []
    if d >= min_depth:
        out.append({li: d for li in leaves})
    if kids:
        for combo in itertools.product(*(stop_vectors(space, c, min_depth) for c in kids)):
            merged = {}
            for part in combo:
                merged.update(part)
            out.append(merged)
    return out


def cond_prob(space, node, li):
    return Fraction(space.leaf_prob[li]) / Fraction(space.path_prob[node])


def inner_value(U, node, side, strict):
    """min (side 'lower') or max ('upper') over rho of E_node[U(rho, d, .)] etc."""
    sp = U.space
    d = sp.depth[node]
    N = sp.horizon_index
    start = min(d + 1, N) if strict else d
    vals = []
    for vec in stop_vectors(sp, node, start):
        total = Fraction(0)
        for li, r in vec.items():
            k = max(r, d)
            at = sp.leaf_path[li][k]
            u = U(r, d, at) if side == "lower" else U(d, r, at)
            total += cond_prob(sp, node, li) * Fraction(u)
        vals.append(total)
    return min(vals) if side == "lower" else max(vals)


def brute_families(U):
    sp = U.space
    return {
        "V1": [inner_value(U, n, "lower", False) for n in range(sp.n_nodes)],
        "V1+": [inner_value(U, n, "lower", True) for n in range(sp.n_nodes)],
        "V2": [inner_value(U, n, "upper", False) for n in range(sp.n_nodes)],
        "V2+": [inner_value(U, n, "upper", True) for n in range(sp.n_nodes)],
    }


def all_stop_vectors(space):
    return [tuple(v[li] for li in range(space.n_leaves)) for v in stop_vectors(space, 0, 0)]


def dynkin_brute(space, lower, upper, tie, order):
    """Open-loop Dynkin value over raw stop-depth vectors."""
    vecs = all_stop_vectors(space)

    def pay(rho, tau):
        total = Fraction(0)
        for li, (r, t) in enumerate(zip(rho, tau)):
            tau_first = t <= r if tie == "LOW" else t < r
            node = space.leaf_path[li][t if tau_first else r]
            total += Fraction(space.leaf_prob[li]) * Fraction(lower[node] if tau_first else upper[node])
        return total

    if order == "INF_SUP":
        return min(max(pay(r, t) for t in vecs) for r in vecs)
    return max(min(pay(r, t) for r in vecs) for t in vecs)


def _admissible(vecs, table, kind):
    for i, j in itertools.combinations(range(len(vecs)), 2):
        s1, s2 = vecs[i], vecs[j]
        a, b = vecs[table[i]], vecs[table[j]]
        for li in range(len(s1)):
            m = min(s1[li], s2[li])
            if kind == "I":
                ok = (a[li] == b[li] and a[li] <= m) or min(a[li], b[li]) > m
            else:
                ok = (a[li] == b[li] and a[li] < m) or min(a[li], b[li]) >= m
            if not ok:
                return False
    return True


def strategy_games_brute(U):
    """(A_upper, A_lower, B_upper, B_lower) by scoring every table of indices."""
    sp = U.space
    vecs = all_stop_vectors(sp)
    M = len(vecs)

    def E(rho, tau):
        total = Fraction(0)
        for li, (r, t) in enumerate(zip(rho, tau)):
            node = sp.leaf_path[li][max(r, t)]
            total += Fraction(sp.leaf_prob[li]) * Fraction(U(r, t, node))
        return total

    P = [[E(vecs[a], vecs[b]) for b in range(M)] for a in range(M)]
    out = {}
    for kind in ("I", "II"):
        ups, lows = [], []
        for table in itertools.product(range(M), repeat=M):
            if not _admissible(vecs, table, kind):
                continue
            ups.append(max(P[table[i]][i] for i in range(M)))
            lows.append(min(P[i][table[i]] for i in range(M)))
        out[kind] = (min(ups), max(lows))
    return out["I"][0], out["I"][1], out["II"][0], out["II"][1]
