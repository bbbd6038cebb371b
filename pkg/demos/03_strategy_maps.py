"""Building non-anticipative strategy maps and checking their type.

A rho-map anchored at some stopping time follows the anchor once tau has
passed it and otherwise answers with the best inner stop.  Asking for a
strictly later inner stop makes the map Type I.
"""
from stopgame.filtered_space import enumerate_stopping_times
from stopgame.fixtures import binary_tree, random_table_payoff
from stopgame.oracle import d_values
from stopgame.strategies import RHO, TYPE_I, TYPE_II, best_response_to_map, build_rho_map, \
    check_nonanticipativity, strategy_game_value

U = random_table_payoff(binary_tree(2, p="1/3"), seed=57)
times = enumerate_stopping_times(U.space)
D, opt = d_values(U, times=times, with_optimizers=True)
print("Dynkin values:", {k: str(v) for k, v in D.items()})

anchor = opt["D_strict_upper"]
for strict in (True, False):
    m = build_rho_map(U, anchor, strict_inner=strict)
    print(f"\nstrict={strict}: anchor {anchor.short()}")
    for kind in (TYPE_I, TYPE_II):
        cex = check_nonanticipativity(m, kind, times)
        print(f"  Type {kind}: {'ok' if cex is None else cex}")
    print("  sup over tau:", strategy_game_value(U, m, RHO, times))
    tau_m, val = best_response_to_map(U, m)
    print(f"  constructed reply {tau_m.short()} earns {val} (floor {D['D_strict_lower']})")
