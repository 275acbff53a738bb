"""Truncated Lazard ring: graded ranks, a reduced coefficient, and the FGL identities."""

from bivcob.lazard import build_lazard, monomial_str, universal_fgl

R = build_lazard(4)
print("free ranks by degree:", R.free_ranks())
for d in range(5):
    print(f"  degree {d}: basis", [monomial_str(m) for m in R.basis[d]])

# a21 and a12 name the same coefficient; normal forms agree
print("a21 ->", R.normal_form(R.a(2, 1)))

F = universal_fgl(R)
print("defects after reduction:", F.defects())
