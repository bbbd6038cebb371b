"""Finite filtered probability spaces encoded as event trees.

Nodes at depth ``k`` are the atoms of the sigma-algebra at grid time
``times[k]``.  Leaves all sit at depth ``N = len(times) - 1`` and carry the
path probabilities of the sample space.  Stopping times are adapted
STOP/CONTINUE labelings of the nodes.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError

RATIONAL = "rational"
FLOAT = "float"
FLOAT_TOL = 1e-9


def to_fraction(x) -> Fraction:
    """Parse ints, floats, decimal strings and ``"a/b"`` strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, str)):
        return Fraction(x.strip() if isinstance(x, str) else x)
    if isinstance(x, float):
        # decimal round-trip so 0.1 means 1/10, not the binary expansion
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class TimeGrid:
    times: tuple

    def __post_init__(self):
        times = tuple(to_fraction(t) for t in self.times)
        if not times:
            raise ValidationError("time grid is empty")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValidationError("time grid must be strictly increasing")
        if times[-1] <= 0:
            raise ValidationError("horizon must be positive")
        object.__setattr__(self, "times", times)

    @property
    def horizon(self) -> Fraction:
        return self.times[-1]

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def __len__(self):
        return len(self.times)

    def __getitem__(self, k):
        return self.times[k]


class FilteredSpace:
    """Validated event tree with breadth-first node numbering.

    Use :func:`build_space` (or the helpers in :mod:`stopgame.fixtures`)
    rather than calling the constructor with raw arrays.
    """

    def __init__(self, grid: TimeGrid, parent: Sequence, branch_prob: Sequence,
                 mode: str = RATIONAL, source_ids: Sequence | None = None):
        if mode not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown arithmetic mode {mode!r}")
        self.grid = grid
        self.mode = mode
        self.parent = tuple(parent)
        self.branch_prob_exact = tuple(to_fraction(p) for p in branch_prob)
        self.source_ids = tuple(source_ids) if source_ids is not None else tuple(range(len(parent)))
        n = len(self.parent)

        depth = [0] * n
        children = [[] for _ in range(n)]
        for i, p in enumerate(self.parent):
            if p is not None:
                depth[i] = depth[p] + 1
                children[p].append(i)
        self.depth = tuple(depth)
        self.children = tuple(tuple(c) for c in children)
        self.branch_prob = tuple(self.num(p) for p in self.branch_prob_exact)

        path_prob = [self.num(1)] * n
        for i in range(1, n):
            path_prob[i] = path_prob[self.parent[i]] * self.branch_prob[i]
        self.path_prob = tuple(path_prob)

        self.leaves = tuple(i for i in range(n) if not self.children[i])
        self.leaf_prob = tuple(self.path_prob[i] for i in self.leaves)
        paths = []
        for leaf in self.leaves:
            path = [leaf]
            while self.parent[path[-1]] is not None:
                path.append(self.parent[path[-1]])
            paths.append(tuple(reversed(path)))
        # leaf_path[l][k] is the depth-k ancestor of leaf l
        self.leaf_path = tuple(paths)
        under = [[] for _ in range(n)]
        for li, path in enumerate(paths):
            for node in path:
                under[node].append(li)
        self.leaves_under = tuple(tuple(u) for u in under)
        self.nodes_at_depth = tuple(
            tuple(i for i in range(n) if depth[i] == k) for k in range(grid.n_steps + 1)
        )

    # numeric helpers ---------------------------------------------------
    def num(self, x):
        """Convert ``x`` into this space's scalar type."""
        if self.mode == RATIONAL:
            return to_fraction(x)
        return float(x) if isinstance(x, (int, float)) else float(to_fraction(x))

    def zero(self):
        return self.num(0)

    def isclose(self, a, b) -> bool:
        if self.mode == RATIONAL:
            return a == b
        return abs(a - b) <= FLOAT_TOL

    def as_mode(self, mode: str) -> "FilteredSpace":
        if mode == self.mode:
            return self
        return FilteredSpace(self.grid, self.parent, self.branch_prob_exact, mode, self.source_ids)

    # structure ---------------------------------------------------------
    @property
    def n_nodes(self) -> int:
        return len(self.parent)

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    @property
    def horizon_index(self) -> int:
        return self.grid.n_steps

    def time(self, node: int):
        return self.grid[self.depth[node]]

    def ancestor(self, node: int, depth: int) -> int:
        if depth > self.depth[node]:
            raise ValueError(f"node {node} has no ancestor at depth {depth}")
        while self.depth[node] > depth:
            node = self.parent[node]
        return node

    def subtree(self, node: int) -> list:
        """Nodes of the subtree rooted at ``node`` in breadth-first order."""
        out, queue = [], deque([node])
        while queue:
            m = queue.popleft()
            out.append(m)
            queue.extend(self.children[m])
        return out

    def is_chain(self) -> bool:
        return self.n_leaves == 1

    def to_dict(self) -> dict:
        nodes = []
        for i in range(self.n_nodes):
            entry = {"id": i, "depth": self.depth[i]}
            if self.parent[i] is not None:
                entry["parent"] = self.parent[i]
                entry["p"] = str(self.branch_prob_exact[i])
            nodes.append(entry)
        return {"grid": [str(t) for t in self.grid.times], "nodes": nodes}

    def __repr__(self):
        return (f"FilteredSpace(nodes={self.n_nodes}, leaves={self.n_leaves}, "
                f"N={self.horizon_index}, mode={self.mode!r})")


def build_space(spec: dict, mode: str = RATIONAL) -> FilteredSpace:
    """Validate an instance description and return a breadth-first numbered space.

    ``spec`` has the JSON shape ``{"grid": [...], "nodes": [{"id", "depth",
    "parent", "p"}, ...]}``.  The root has no parent (and no ``p``).
    """
    if "grid" not in spec or "nodes" not in spec:
        raise ValidationError("instance needs 'grid' and 'nodes'")
    grid = TimeGrid(tuple(spec["grid"]))
    raw = spec["nodes"]
    if not raw:
        raise ValidationError("instance has no nodes")

    by_id, order = {}, []
    for entry in raw:
        nid = entry.get("id")
        if nid is None:
            raise ValidationError("node entry without id")
        if nid in by_id:
            raise ValidationError("duplicate node id", node=nid)
        by_id[nid] = entry
        order.append(nid)

    roots = [nid for nid in order if by_id[nid].get("parent") is None]
    if len(roots) != 1:
        raise ValidationError(f"expected exactly one root, found {len(roots)}")
    root = roots[0]

    kids = {nid: [] for nid in order}
    for nid in order:
        par = by_id[nid].get("parent")
        if par is None:
            continue
        if par not in by_id:
            raise ValidationError(f"dangling parent {par}", node=nid)
        kids[par].append(nid)

    if by_id[root].get("depth", 0) != 0:
        raise ValidationError("root must have depth 0", node=root)
    if "p" in by_id[root] and to_fraction(by_id[root]["p"]) != 1:
        raise ValidationError("root probability must be 1", node=root)

    n_steps = grid.n_steps
    bfs, queue, seen = [], deque([root]), {root}
    depth_of = {root: 0}
    while queue:
        nid = queue.popleft()
        bfs.append(nid)
        d = depth_of[nid]
        declared = by_id[nid].get("depth", d)
        if declared != d:
            raise ValidationError(f"declared depth {declared} but parent chain gives {d}", node=nid)
        if d > n_steps:
            raise ValidationError(f"depth {d} beyond horizon index {n_steps}", node=nid)
        if not kids[nid] and d != n_steps:
            raise ValidationError(f"leaf at depth {d}, expected {n_steps}", node=nid)
        if kids[nid]:
            probs = []
            for c in kids[nid]:
                if "p" not in by_id[c]:
                    raise ValidationError("missing branch probability", node=c)
                p = to_fraction(by_id[c]["p"])
                if not 0 < p <= 1:
                    raise ValidationError(f"branch probability {p} outside (0, 1]", node=c)
                probs.append(p)
            if sum(probs) != 1:
                raise ValidationError(f"children probabilities sum to {sum(probs)}", node=nid)
        for c in kids[nid]:
            if c in seen:
                raise ValidationError("node reachable twice", node=c)
            seen.add(c)
            depth_of[c] = d + 1
            queue.append(c)
    if len(bfs) != len(order):
        missing = sorted(set(order) - seen, key=str)
        raise ValidationError("unreachable node (cycle?)", node=missing[0])

    new_id = {nid: i for i, nid in enumerate(bfs)}
    parent = [None if by_id[nid].get("parent") is None else new_id[by_id[nid]["parent"]]
              for nid in bfs]
    probs = [Fraction(1) if parent[i] is None else to_fraction(by_id[nid]["p"])
             for i, nid in enumerate(bfs)]
    return FilteredSpace(grid, parent, probs, mode=mode, source_ids=bfs)


# ---------------------------------------------------------------------------
# random variables

def expectation(space: FilteredSpace, X: Sequence):
    if len(X) != space.n_leaves:
        raise ValueError(f"random variable has {len(X)} values, space has {space.n_leaves} leaves")
    total = space.zero()
    for p, x in zip(space.leaf_prob, X):
        total += p * x
    return total


def conditional_expectation(space: FilteredSpace, X: Sequence, sigma: "StoppingTime") -> tuple:
    """Leaf-indexed version of ``E[X | F_sigma]``."""
    if len(X) != space.n_leaves:
        raise ValueError("random variable does not match the space")
    out = [None] * space.n_leaves
    for node in sigma.stop_nodes:
        leaves = space.leaves_under[node]
        total = space.zero()
        for li in leaves:
            total += space.leaf_prob[li] * X[li]
        avg = total / space.path_prob[node]
        for li in leaves:
            out[li] = avg
    return tuple(out)


# ---------------------------------------------------------------------------
# stopping times

@dataclass(frozen=True)
class StoppingTime:
    """Canonical STOP/CONTINUE labeling.

    Every root-to-leaf path carries exactly one STOP label; nodes below it
    are CONTINUE.  Equality and hashing use the labels only.
    """

    labels: tuple
    space: FilteredSpace = field(compare=False, repr=False)
    leaf_depth: tuple = field(init=False, compare=False, repr=False)
    leaf_node: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        sp = self.space
        depths, nodes = [], []
        for path in sp.leaf_path:
            hit = [n for n in path if self.labels[n]]
            if len(hit) != 1:
                raise ValidationError(
                    f"path to leaf {path[-1]} has {len(hit)} STOP labels after canonicalization",
                    node=path[-1])
            nodes.append(hit[0])
            depths.append(sp.depth[hit[0]])
        object.__setattr__(self, "leaf_depth", tuple(depths))
        object.__setattr__(self, "leaf_node", tuple(nodes))

    @property
    def stop_nodes(self) -> tuple:
        return tuple(i for i, lab in enumerate(self.labels) if lab)

    def times(self) -> tuple:
        return tuple(self.space.grid[d] for d in self.leaf_depth)

    def is_constant(self) -> bool:
        return len(set(self.leaf_depth)) == 1

    def short(self) -> str:
        """Compact label string, e.g. ``'S..SS'`` (S = stop node)."""
        return "".join("S" if lab else "." for lab in self.labels)

    def __repr__(self):
        return f"StoppingTime({self.short()}, depths={self.leaf_depth})"


def validate_stopping_time(space: FilteredSpace, labels: Iterable) -> StoppingTime:
    """Canonicalize a per-node labeling into a :class:`StoppingTime`.

    Truthy labels (or the string ``"STOP"``) mean stop.  STOP labels below an
    earlier STOP are dropped.  Raises :class:`ValidationError` when some path
    never stops.
    """
    raw = [lab == "STOP" if isinstance(lab, str) else bool(lab) for lab in labels]
    if len(raw) != space.n_nodes:
        raise ValidationError(f"expected {space.n_nodes} labels, got {len(raw)}")
    canon = [False] * space.n_nodes
    stopped = [False] * space.n_nodes
    for i in range(space.n_nodes):  # BFS order: parents first
        par = space.parent[i]
        above = par is not None and stopped[par]
        if raw[i] and not above:
            canon[i] = True
        stopped[i] = above or canon[i]
    for li, leaf in enumerate(space.leaves):
        if not stopped[leaf]:
            raise ValidationError("path never stops", node=leaf)
    return StoppingTime(tuple(canon), space)


def from_leaf_depths(space: FilteredSpace, depths: Sequence[int]) -> StoppingTime:
    """Stopping time with the given pathwise stop index per leaf.

    Raises :class:`ValidationError` if the assignment is not adapted, i.e.
    two leaves sharing their depth-``k`` ancestor disagree about stopping at ``k``.
    """
    labels = [False] * space.n_nodes
    for li, d in enumerate(depths):
        if not 0 <= d <= space.horizon_index:
            raise ValidationError(f"stop index {d} outside grid", node=space.leaves[li])
        node = space.leaf_path[li][d]
        labels[node] = True
    st = StoppingTime(tuple(labels), space) if _one_stop_per_path(space, labels) else None
    if st is None or st.leaf_depth != tuple(depths):
        raise ValidationError("pathwise stop indices are not adapted")
    return st


def _one_stop_per_path(space, labels) -> bool:
    return all(sum(labels[n] for n in path) == 1 for path in space.leaf_path)


def constant_time(space: FilteredSpace, k: int) -> StoppingTime:
    """The deterministic stopping time equal to ``times[k]``."""
    return from_leaf_depths(space, [k] * space.n_leaves)


def st_value(sigma: StoppingTime, leaf: int) -> int:
    """Grid index at which ``sigma`` stops on leaf number ``leaf``."""
    return sigma.leaf_depth[leaf]


def st_meet(a: StoppingTime, b: StoppingTime) -> StoppingTime:
    return from_leaf_depths(a.space, [min(x, y) for x, y in zip(a.leaf_depth, b.leaf_depth)])


def st_join(a: StoppingTime, b: StoppingTime) -> StoppingTime:
    return from_leaf_depths(a.space, [max(x, y) for x, y in zip(a.leaf_depth, b.leaf_depth)])


def strictly_after(rho: StoppingTime, tau: StoppingTime) -> bool:
    """Whether ``rho`` lies in the strict-future set of ``tau``.

    Holds iff on every leaf ``tau < rho`` or ``tau == rho == T``.
    """
    n = rho.space.horizon_index
    return all(t < r or (t == r == n) for r, t in zip(rho.leaf_depth, tau.leaf_depth))


def at_or_after(rho: StoppingTime, tau: StoppingTime) -> bool:
    return all(r >= t for r, t in zip(rho.leaf_depth, tau.leaf_depth))


# ---------------------------------------------------------------------------
# enumeration

DEFAULT_ST_CAP = 1000


def count_stopping_times(space: FilteredSpace) -> int:
    """Number of stopping times: ``c(n) = 1 + prod c(child)``, ``c(leaf) = 1``."""
    count = [1] * space.n_nodes
    for n in reversed(range(space.n_nodes)):
        kids = space.children[n]
        if kids:
            prod = 1
            for k in kids:
                prod *= count[k]
            count[n] = 1 + prod
    return count[0]


def enumerate_stopping_times(space: FilteredSpace, cap: int = DEFAULT_ST_CAP) -> list:
    """All stopping times in canonical order (stop-at-root first).

    Raises :class:`~stopgame.errors.CapacityError` when the count exceeds ``cap``.
    """
    from .errors import CapacityError

    total = count_stopping_times(space)
    if total > cap:
        raise CapacityError("stopping-time enumeration", cap, total)

    def sets(node):
        # each option is a tuple of STOP nodes within the subtree
        yield (node,)
        kids = space.children[node]
        if not kids:
            return
        for combo in itertools.product(*(list(sets(k)) for k in kids)):
            yield tuple(itertools.chain.from_iterable(combo))

    out = []
    for stops in sets(0):
        labels = [False] * space.n_nodes
        for n in stops:
            labels[n] = True
        out.append(StoppingTime(tuple(labels), space))
    return out
