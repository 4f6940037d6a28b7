"""
Explicit witnesses and non-emptiness of X_x(b)
==============================================

For every slope sequence lambda in N(G)_x the package constructs an
explicit matrix in IxI realizing lambda, then verifies it exactly:
membership in the valuation pattern of xI plus a slope computation.
Non-emptiness of the affine Deligne-Lusztig variety X_x(b) reduces to
the same set membership.
"""

from newton_strata import (
    AffineWeylElt,
    IsoMatrix,
    adlv_nonempty,
    coset_pattern,
    poset_of,
    slope_sequence,
    witness,
)

p = 11
x = AffineWeylElt.parse("mu=-2,0,2;w=s121")

print(f"witnesses for every stratum of {x}:")
for lam in poset_of(x).elements:
    W = witness(x, lam, p=p)
    ok_pattern = coset_pattern(x, "xI").contains(W)
    ok_slopes = slope_sequence(W) == lam
    print(f"  lambda = {lam}   pattern: {ok_pattern}   slopes: {ok_slopes}")
    for i in range(3):
        print("     [" + ", ".join(W[i, j].to_text() for j in range(3)) + "]")
print()

# the construction covers every chamber, not just the antidominant one:
# this element sits in the chamber reflected through the first simple wall
y = AffineWeylElt.parse("mu=1,-4,3;w=s21")
for lam in poset_of(y).elements:
    W = witness(y, lam, p=p)
    assert coset_pattern(y, "xI").contains(W) and slope_sequence(W) == lam
print(f"all {len(poset_of(y).elements)} strata of {y} witnessed and verified")
print()

# X_x(b) is non-empty exactly when the slopes of b lie in N(G)_x
b = IsoMatrix.identity(p)
print(f"X_x(1) for x = {x}:", "non-empty" if adlv_nonempty(x, b) else "empty")
z = AffineWeylElt.parse("mu=-1,0,1;w=s1")
print(f"X_x(1) for x = {z}:", "non-empty" if adlv_nonempty(z, b) else "empty")
