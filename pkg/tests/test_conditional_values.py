from fractions import Fraction

import pytest

from oracles import brute_families, inner_value
from stopgame.conditional_values import (
    LOWER,
    UPPER,
    diagonal_family,
    inner_optimizer,
    value_lower,
    value_upper,
)
from stopgame.filtered_space import (
    FLOAT,
    conditional_expectation,
    constant_time,
    enumerate_stopping_times,
    strictly_after,
)
from stopgame.fixtures import (
    binary_tree,
    builtin_fixtures,
    cex,
    cex_payoff,
    random_table_payoff,
)
from stopgame.oracle import families
from stopgame.payoff import build_payoff, eval_payoff

FIXTURES = builtin_fixtures()


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_families_match_brute_force(name):
    U = FIXTURES[name]
    expected = brute_families(U)
    got = families(U)
    for key, vals in expected.items():
        assert list(got[key].values) == vals, key


@pytest.mark.parametrize("seed", range(10))
def test_families_match_brute_force_random(seed):
    U = random_table_payoff(binary_tree(2, p="1/3"), seed)
    expected = brute_families(U)
    got = families(U)
    for key, vals in expected.items():
        assert list(got[key].values) == vals, key


def test_cex_families_frozen():
    # derived by hand: U(s,t) = |f(s) - f(t)| with f jumping after 1/2
    U = cex_payoff()
    assert list(value_lower(U).values) == [0, 0, 0]
    # from time 1/2 the only strictly later stop is T, where f differs
    assert list(value_lower(U, strict=True).values) == [0, 1, 0]
    assert list(value_upper(U).values) == [1, 1, 0]
    assert list(value_upper(U, strict=True).values) == [1, 1, 0]


def test_constant_payoff_families_are_constant():
    U = build_payoff(binary_tree(2), {"kind": "constant", "value": "7/3"})
    for fam in families(U).values():
        assert set(fam.values) == {Fraction(7, 3)}


def test_at_matches_nodewise_values():
    U = random_table_payoff(binary_tree(2), 4)
    v1 = value_lower(U)
    for sigma in enumerate_stopping_times(U.space):
        assert v1.at(sigma) == tuple(v1[U.space.leaf_path[li][d]]
                                     for li, d in enumerate(sigma.leaf_depth))


@pytest.mark.parametrize("strict", [False, True])
@pytest.mark.parametrize("side", [LOWER, UPPER])
def test_inner_optimizer_attains_family(side, strict):
    U = random_table_payoff(binary_tree(2), 11)
    sp = U.space
    fam = (value_lower if side == LOWER else value_upper)(U, strict=strict)
    for base in enumerate_stopping_times(sp):
        opt = inner_optimizer(U, side, strict, base)
        if strict:
            assert strictly_after(opt, base)
        pay = eval_payoff(U, opt, base) if side == LOWER else eval_payoff(U, base, opt)
        assert conditional_expectation(sp, pay, base) == fam.at(base)


def test_inner_optimizer_stops_early_on_ties():
    # constant payoff: every stop is optimal, earliest is the base itself
    U = build_payoff(binary_tree(2), {"kind": "constant", "value": 1})
    base = constant_time(U.space, 1)
    assert inner_optimizer(U, LOWER, False, base) == base
    assert inner_optimizer(U, LOWER, True, base) == constant_time(U.space, 2)


def test_epsilon_optimizer_is_epsilon_optimal():
    U = random_table_payoff(binary_tree(2), 5)
    sp = U.space
    eps = Fraction(1, 2)
    v1 = value_lower(U)
    for base in enumerate_stopping_times(sp):
        opt = inner_optimizer(U, LOWER, False, base, eps=eps)
        got = conditional_expectation(sp, eval_payoff(U, opt, base), base)
        for g, v in zip(got, v1.at(base)):
            assert v <= g <= v + eps * sp.horizon_index


def test_diagonal_family():
    U = random_table_payoff(binary_tree(1), 2)
    diag = diagonal_family(U)
    assert list(diag) == [U(0, 0, 0), U(1, 1, 1), U(1, 1, 2)]


def test_float_mode_agrees_with_rational():
    fq = families(cex_payoff(cex()))
    ff = families(cex_payoff(cex(FLOAT)))
    for key in fq:
        assert all(abs(float(a) - b) < 1e-9 for a, b in zip(fq[key].values, ff[key].values))


def test_oracle_helper_sanity():
    # oracle on the root of CEX: cheapest rho against tau=0 is rho=0
    assert inner_value(cex_payoff(), 0, "lower", False) == 0
