"""Relations at work on the projective line fixture.

The section relation identifies c1(O(1)) of the fundamental class with the
point class; the formal group law then forces c1(O(k))[P1] = k [pt].
"""

from bivcob.bivariant import TheoryHandle
from bivcob.cycles import cycle
from bivcob.exactgroups import GroupElement
from bivcob.quotients import LLabel, build_OB1
from bivcob.site import bundled_site

S = bundled_site("p1")
T = build_OB1(S)
pt = LLabel((), cycle(S, "OB", "c", "i"))

for k in (-2, -1, 0, 1, 2, 3):
    if abs(k) > T.bundle_bound("c"):
        continue
    x = {LLabel((), cycle(S, "OB", "c", "id_P1", [(k,)])): 1}
    same = T.normal_form("c", x) == T.normal_form("c", {pt: k})
    print(f"c1(O({k}))[P1] == {k}[pt] in OB1: {same}")

raw = TheoryHandle(S, "OB").group("c")
sect = GroupElement.make(0, {cycle(S, "OB", "c", "id_P1", [(1,)]): 1, cycle(S, "OB", "c", "i"): -1})
print("same relation zero in raw OB:", raw.is_zero(sect))

print("OB1(P1 -> pt) invariants:", T.invariants("c"))
print("summary:", T._quotient.summary("c")["relations"])
