"""Three time points, one jump: why Type I and Type II games can disagree.

On {0, 1/2, 1} the payoff is |f(rho) - f(tau)| with f switching from 0 to 1
right after 1/2.  We compute the four strategy-game values by exhaustive
search, then look at the maps that attain them.
"""
from stopgame.fixtures import cex_payoff
from stopgame.oracle import brute_game_values, sandwich_report

U = cex_payoff()
gv = brute_game_values(U)
print("stopping times:", [st.short() for st in gv.times])
for name, value in gv.as_dict().items():
    table = [gv.times[i].short() for i in gv.witnesses[name].table]
    print(f"{name:8s} = {value}   witness map: {table}")

# A Type I rho-map may only react strictly after tau, so against tau = 1/2 it
# must commit to 0 or T and pays 1 either way.  Type II maps can copy tau.
rep = sandwich_report(U, game_values=gv)
print()
for c in rep.checks:
    flag = "binds" if c.binds else ""
    print(f"{c.name:4s} {c.lhs} {c.relation} {c.rhs}  {c.status} {flag}")
