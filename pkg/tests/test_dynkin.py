import itertools

import pytest

from oracles import dynkin_brute
from stopgame.dynkin import (
    HIGH,
    INF_SUP,
    LOW,
    SUP_INF,
    DynkinSpec,
    dynkin_closed_loop,
    dynkin_open_loop,
    dynkin_saddle,
    jj_decomposition,
)
from stopgame.errors import OrderingError
from stopgame.filtered_space import FLOAT
from stopgame.fixtures import binary_tree, builtin_fixtures, cex, cex_payoff, random_table_payoff
from stopgame.oracle import families

FIXTURES = builtin_fixtures()
COMBOS = list(itertools.product(("V1", "V1+"), ("V2", "V2+"), (LOW, HIGH)))


def _ordered_specs(U):
    fams = families(U)
    for lo, up, tie in COMBOS:
        spec = DynkinSpec(fams[lo], fams[up], tie)
        if spec.is_ordered():
            yield (lo, up, tie), spec


def _instances():
    for name in sorted(FIXTURES):
        yield name, FIXTURES[name]
    for seed in range(6):
        yield f"B2/seed{seed}", random_table_payoff(binary_tree(2), seed)


@pytest.mark.parametrize("name,U", list(_instances()), ids=lambda x: x if isinstance(x, str) else "")
def test_closed_loop_equals_brute_open_loop(name, U):
    for (lo, up, tie), spec in _ordered_specs(U):
        closed = dynkin_closed_loop(spec).root_value
        for order in (INF_SUP, SUP_INF):
            assert closed == dynkin_brute(U.space, spec.lower, spec.upper, tie, order), (lo, up, tie)
            assert closed == dynkin_open_loop(spec, order)


@pytest.mark.parametrize("name,U", list(_instances()), ids=lambda x: x if isinstance(x, str) else "")
def test_jj_matches_closed_loop(name, U):
    for _, spec in _ordered_specs(U):
        jj = jj_decomposition(spec.lower, spec.upper, spec.tie)
        assert jj.value == dynkin_closed_loop(spec).root_value
        assert 1 <= jj.iterations <= 10 * U.space.n_nodes
        # both families stay nonnegative after the shift
        assert min(jj.J) >= 0 and min(jj.J_prime) >= 0


def test_cex_d_value_frozen():
    # derived: lower V1+ = (0,1,0), upper V2 = (1,1,0); HIGH tie
    fams = families(cex_payoff())
    spec = DynkinSpec(fams["V1+"], fams["V2"], HIGH)
    assert dynkin_closed_loop(spec).root_value == 1
    assert dynkin_closed_loop(DynkinSpec(fams["V1"], fams["V2"], LOW)).root_value == 0


def test_unordered_spec_raises():
    fams = families(random_table_payoff(binary_tree(1), 0))
    spec = DynkinSpec(fams["V2"], fams["V1"], LOW)
    if spec.is_ordered():
        pytest.skip("seed happens to give equal families")
    with pytest.raises(OrderingError):
        dynkin_closed_loop(spec)
    # the open-loop solver still works
    dynkin_open_loop(spec, INF_SUP)


@pytest.mark.parametrize("seed", range(5))
def test_saddle_certificate(seed):
    U = random_table_payoff(binary_tree(2, p="2/3"), seed)
    for _, spec in _ordered_specs(U):
        rho, tau, cert = dynkin_saddle(spec)
        assert cert.ok


def test_stop_regions_touch_barriers():
    U = random_table_payoff(binary_tree(2), 8)
    fams = families(U)
    sol = dynkin_closed_loop(DynkinSpec(fams["V1"], fams["V2"], LOW))
    for n in sol.tau_star.stop_nodes:
        assert sol.value[n] == fams["V1"][n]
    for n in sol.rho_star.stop_nodes:
        assert sol.value[n] == fams["V2"][n]


def test_float_mode_jj():
    fams = families(cex_payoff(cex(FLOAT)))
    jj = jj_decomposition(fams["V1+"], fams["V2"], HIGH)
    assert abs(jj.value - 1.0) < 1e-9
