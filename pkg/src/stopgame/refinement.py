"""Grid-halving studies: how far apart are the game and Dynkin values at step ``dt``?

At finite resolution the strategy games and the Dynkin variants need not
agree; the spread ``max - min`` over every value computed at one level is
the quantity expected to shrink under refinement.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CapacityError
from .filtered_space import DEFAULT_ST_CAP, RATIONAL, enumerate_stopping_times
from .fixtures import abs_time_diff, binary_tree, chain, w_process_payoff
from .oracle import DEFAULT_MAP_CAP, brute_game_values, d_values


@dataclass
class RefineRow:
    level: int
    n_steps: int
    delta: Fraction
    values: dict
    spread: object
    source: str  # "exhaustive" when the four game values are included, else "d-values"
    A_upper: object = None
    notes: list = field(default_factory=list)


def _row(level, n_steps, U, with_games, cap_st, cap_maps):
    sp = U.space
    times = enumerate_stopping_times(sp, cap_st)
    values = dict(d_values(U, times=times))
    source, a_up, notes = "d-values", None, []
    if with_games:
        try:
            gv = brute_game_values(U, cap_maps=cap_maps, times=times)
            values.update(gv.as_dict())
            source, a_up = "exhaustive", gv.A_upper
        except CapacityError as exc:
            notes.append(f"game values skipped: {exc}")
    spread = max(values.values()) - min(values.values())
    delta = sp.grid.horizon / n_steps
    return RefineRow(level, n_steps, delta, values, spread, source, a_up, notes)


def refine_abs_time_diff(levels: int = 3, mode: str = RATIONAL, horizon=1,
                         cap_stopping_times: int = DEFAULT_ST_CAP,
                         cap_maps: int = DEFAULT_MAP_CAP, with_games: bool = True) -> list:
    """``U = |s - t|`` on deterministic uniform grids with ``N = 2, 4, ..., 2**levels``."""
    rows = []
    for level in range(1, levels + 1):
        n = 2 ** level
        U = abs_time_diff(chain(n, horizon, mode))
        rows.append(_row(level, n, U, with_games, cap_stopping_times, cap_maps))
    return rows


def refine_w_process(depths=(2, 3), seed: int = 0, mode: str = "float",
                     cap_stopping_times: int = DEFAULT_ST_CAP) -> list:
    """Seeded Lipschitz payoff on binomial trees of increasing depth (D-values only)."""
    rows = []
    for level, depth in enumerate(depths, start=1):
        U = w_process_payoff(binary_tree(depth, mode=mode), seed)
        rows.append(_row(level, depth, U, False, cap_stopping_times, 0))
    return rows
