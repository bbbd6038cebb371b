"""One Dynkin game, solved by independent routes.

The clamp recursion is compared with brute-force open-loop search in both
orders. The J/J' fixed point has to land on the same root value too.
"""
from stopgame.dynkin import HIGH, INF_SUP, LOW, SUP_INF, DynkinSpec, dynkin_closed_loop, \
    dynkin_open_loop, jj_decomposition
from stopgame.fixtures import binary_tree, random_table_payoff
from stopgame.oracle import families

U = random_table_payoff(binary_tree(2, p="1/3"), seed=57)
fams = families(U)
for name, fam in fams.items():
    print(f"{name:4s}", [str(v) for v in fam.values])

print()
for lo, up in (("V1", "V2"), ("V1+", "V2"), ("V1", "V2+")):
    for tie in (LOW, HIGH):
        spec = DynkinSpec(fams[lo], fams[up], tie)
        if not spec.is_ordered():
            print(f"{spec.label():18s} not ordered, skipped")
            continue
        sol = dynkin_closed_loop(spec)
        jj = jj_decomposition(fams[lo], fams[up], tie)
        print(f"{spec.label():18s} clamp {str(sol.root_value):6s} "
              f"inf-sup {str(dynkin_open_loop(spec, INF_SUP)):6s} "
              f"sup-inf {str(dynkin_open_loop(spec, SUP_INF)):6s} "
              f"J-J' {jj.value} ({jj.iterations} sweeps)")
        print(" " * 19, "stop regions:", sol.stop_regions)
