"""
The poset of Newton strata on an Iwahori double coset
=====================================================

Every x = pi^mu w in the affine Weyl group of SL3 carries a finite poset
N(G)_x of slope sequences: the classes meeting the double coset IxI.
The package materializes each poset from closed-form tables indexed by w
and the Weyl chamber of the alcove of x.
"""

from newton_strata import AffineWeylElt, chamber_of, poset_of

# the running example: a two-element poset whose extra isolated top makes
# the codimension of its bottom stratum drop to 1
x = AffineWeylElt.parse("mu=-2,0,2;w=s121")
pos = poset_of(x)
print(f"x = {x}   chamber {chamber_of(x).name}")
print("generic slope nu_x:", pos.nu_x)
print("elements:", "; ".join(str(z) for z in pos.elements))
print("shape tag:", pos.shape)
print()

# the same translation part with different w fills the whole interval
y = AffineWeylElt.parse("mu=-2,0,2;w=s12")
pos_y = poset_of(y)
print(f"y = {y}")
print("elements:", "; ".join(str(z) for z in pos_y.elements))
print("cover relations:")
for i, j in pos_y.hasse:
    print(f"  {pos_y.elements[i]}  <  {pos_y.elements[j]}")
print()

# pure translations are rigid: a single stratum, pinned by the exponents
t = AffineWeylElt.parse("mu=3,-1,-2")
print(f"t = {t}   N(G)_t = {{ {poset_of(t).elements[0]} }}")
print()

# the Hasse diagram exports to DOT for rendering with graphviz
print(pos_y.to_dot())
