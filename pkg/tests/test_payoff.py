from fractions import Fraction

import pytest

from stopgame.errors import ValidationError
from stopgame.filtered_space import FLOAT, constant_time, enumerate_stopping_times
from stopgame.fixtures import binary_tree, cex, cex_payoff, chain, w_process_payoff
from stopgame.payoff import (
    build_payoff,
    diag_at,
    eval_payoff,
    evaluation_domain,
    lipschitz_certificate,
)


def test_domain_depth_is_max_index():
    sp = binary_tree(2)
    dom = list(evaluation_domain(sp))
    assert all(sp.depth[n] == max(s, t) for s, t, n in dom)
    # each of the 3x3 index pairs lands on every node at depth max(s, t)
    assert len(dom) == 1 * 1 + 3 * 2 + 5 * 4


def test_constant_payoff():
    U = build_payoff(cex(), {"kind": "constant", "value": "3/2"})
    assert set(U.table.values()) == {Fraction(3, 2)}


def test_cex_table():
    U = cex_payoff()
    # f = indicator of (1/2, 1] on {0, 1/2, 1}
    assert U(0, 2, 2) == 1 and U(1, 2, 2) == 1 and U(0, 1, 1) == 0 and U(2, 2, 2) == 0


def test_abs_time_diff_uses_grid_units():
    sp = chain(4, horizon=2)
    U = build_payoff(sp, {"kind": "abs_time_diff"})
    assert U(0, 4, 4) == 2
    assert U(3, 1, 3) == 1


def test_table_payoff_needs_full_domain():
    sp = cex()
    entries = [{"s": s, "t": t, "node": n, "v": s - t} for s, t, n in evaluation_domain(sp)]
    U = build_payoff(sp, {"kind": "table", "entries": entries})
    assert U(2, 0, 2) == 2
    with pytest.raises(ValidationError, match="no entry"):
        build_payoff(sp, {"kind": "table", "entries": entries[:-1]})


def test_table_entry_depth_mismatch():
    sp = cex()
    with pytest.raises(ValidationError, match="depth"):
        build_payoff(sp, {"kind": "table", "entries": [{"s": 0, "t": 0, "node": 2, "v": 1}]})


def test_unknown_kind():
    with pytest.raises(ValidationError):
        build_payoff(cex(), {"kind": "quadratic"})


def test_utility_spread_piecewise():
    sp = chain(2)
    U = build_payoff(sp, {
        "kind": "utility_spread",
        "f_time": [0, 1, 2], "g_time": [0, 0, 1],
        "utility": {"piecewise_linear": [[-2, -4], [0, 0], [2, 1]]},
    })
    # u is steep for losses and flat for gains
    assert U(2, 0, 2) == 1  # u(2)
    assert U(0, 2, 2) == -2  # u(-1)


def test_utility_must_be_monotone():
    with pytest.raises(ValidationError):
        build_payoff(chain(1), {"kind": "utility_spread", "f_time": [0, 1], "g_time": [0, 1],
                                "utility": {"piecewise_linear": [[0, 1], [1, 0]]}})


def test_w_process_linear_and_lipschitz():
    sp = binary_tree(2)
    U = build_payoff(sp, {"kind": "w_process", "W": {"linear": {"s": 1, "abs_xy": "1/2"}},
                          "L": 1, "f": [0, 1, -1, 2, 0, 0, -2], "g": [0] * 7})
    assert U(1, 0, 1) == Fraction(1, 2) + Fraction(1, 2)
    ok, worst = lipschitz_certificate(U)
    assert ok and worst <= 1


def test_lipschitz_certificate_catches_understated_constant():
    sp = chain(1)
    U = build_payoff(sp, {"kind": "w_process", "W": {"linear": {"x": 3}}, "L": 1,
                          "f": [0, 1], "g": [0, 0]})
    ok, worst = lipschitz_certificate(U)
    assert not ok and worst > 1


@pytest.mark.parametrize("seed", range(5))
def test_w_fixture_certificate(seed):
    U = w_process_payoff(binary_tree(2), seed)
    assert lipschitz_certificate(U)[0]


def test_eval_payoff_and_diagonal():
    U = cex_payoff()
    sp = U.space
    T = constant_time(sp, 2)
    zero = constant_time(sp, 0)
    assert eval_payoff(U, zero, T) == (1,)
    assert [diag_at(U, n) for n in range(sp.n_nodes)] == [0, 0, 0]


def test_float_mode_payoff():
    U = cex_payoff(cex(FLOAT))
    assert isinstance(U(0, 2, 2), float)
    times = enumerate_stopping_times(U.space)
    assert len(times) == 3
