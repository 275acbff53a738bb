"""Over the one-point site the bordism quotient OB1 reproduces the Lazard ring."""

from bivcob.lazard import build_lazard
from bivcob.quotients import build_OB1
from bivcob.site import bundled_site

S = bundled_site("point")
for N in range(5):
    T = build_OB1(S, N=N)
    ranks = [T.invariants("id_pt")[d][0] for d in range(N + 1)]
    print(f"N={N}: OB1(pt -> pt) ranks {ranks}, Lazard {build_lazard(N).free_ranks()}")

T = build_OB1(S, N=3)
print("grade 3 generators:", T.generators("id_pt")[-3:])
