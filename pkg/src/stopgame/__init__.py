"""Stopper-vs-stopper games on finite filtered probability spaces.

Value families of the inner stopping problems, the induced Dynkin games,
non-anticipative strategy maps and an exhaustive oracle for the strategy
games on small event trees.
"""
from .conditional_values import (
    LOWER,
    UPPER,
    NodeValueFamily,
    inner_optimizer,
    value_lower,
    value_upper,
)
from .dynkin import (
    HIGH,
    INF_SUP,
    LOW,
    SUP_INF,
    DynkinSolution,
    DynkinSpec,
    dynkin_closed_loop,
    dynkin_open_loop,
    dynkin_saddle,
    jj_decomposition,
)
from .errors import CapacityError, OrderingError, StopGameError, ValidationError
from .filtered_space import (
    FilteredSpace,
    StoppingTime,
    TimeGrid,
    build_space,
    conditional_expectation,
    constant_time,
    enumerate_stopping_times,
    expectation,
    st_join,
    st_meet,
    st_value,
    strictly_after,
    validate_stopping_time,
)
from .oracle import (
    GameValues,
    SandwichReport,
    brute_game_values,
    d_values,
    enumerate_strategy_maps,
    sandwich_report,
)
from .payoff import Payoff, build_payoff, diagonal, eval_payoff
from .strategies import (
    RHO,
    TAU,
    TYPE_I,
    TYPE_II,
    StrategyMap,
    best_response_to_map,
    build_rho_map,
    build_tau_map,
    check_nonanticipativity,
    fixed_point_check,
    strategy_game_value,
)

__version__ = "0.1.0"
