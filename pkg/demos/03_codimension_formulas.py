"""
Two codimension formulas and where they disagree
================================================

The codimension of a closed Newton stratum can be computed as the longest
chain up to the generic point inside N(G)_x, or by a root-theoretic
ceiling sum that subtracts 1 on an explicit exception list.  The two
agree almost everywhere on the grid |mu_i| <= 4; the handful of
disagreements sit at half-integral slopes on exceptional elements.
"""

from newton_strata import (
    AffineWeylElt,
    SlopeSeq,
    codim,
    codim_roottheoretic,
    enumerate_grid,
    is_exceptional,
    poset_of,
)

x = AffineWeylElt.parse("mu=-2,0,2;w=s121")
zero = SlopeSeq.parse("0,0,0")
print(f"x = {x}   exceptional: {is_exceptional(x)}")
print("chain codim of the bottom stratum:  ", codim(x, zero))
print("ceiling-sum codim (with correction):", codim_roottheoretic(x, zero))
print()

# sweep the grid and tally agreement
total = 0
disagree = []
for g in enumerate_grid(4):
    pos = poset_of(g)
    for lam in pos.elements:
        if is_exceptional(g) and lam == pos.nu_x:
            continue  # the corrected formula is undefined at the generic slope
        total += 1
        a, b = codim(g, lam), codim_roottheoretic(g, lam)
        if a != b:
            disagree.append((g, lam, a, b))

print(f"checked {total} (x, lambda) pairs on the |mu_i| <= 4 grid")
print(f"disagreements: {len(disagree)}")
for g, lam, a, b in disagree:
    print(f"  {g}  lam={lam}:  chain {a}  vs  ceiling {b}")
