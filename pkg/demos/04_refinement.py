"""Halving the time step: the gap between game values closes.

For |rho - tau| on a deterministic grid the Type I upper value is one grid
step, while every Type II or Dynkin value is 0.  For a Lipschitz payoff of a
random walk the spread of the six Dynkin values shrinks as the tree deepens.
Output is CSV-ready.
"""
from stopgame.refinement import refine_abs_time_diff, refine_w_process

print("payoff,level,n_steps,delta,spread,source")
for r in refine_abs_time_diff(levels=3):
    print(f"abs_time_diff,{r.level},{r.n_steps},{r.delta},{r.spread},{r.source}")
for r in refine_w_process(depths=(2, 3, 4), seed=0):
    print(f"w_process,{r.level},{r.n_steps},{r.delta},{r.spread:.6f},{r.source}")
