"""Double point quotient on the degeneration fixture, with and without its registry."""

import json

from bivcob.bivariant import TheoryHandle
from bivcob.quotients import build_OB3, dp_relations
from bivcob.site import bundled_path, bundled_site, load_site

S = bundled_site("dp_demo")
print("relations over pt:", dp_relations(S, "id_pt").elements)
print("M(pt)  :", TheoryHandle(S, "M").invariants("id_pt"))
print("OB3(pt):", build_OB3(S).invariants("id_pt"))

doc = json.loads(bundled_path("dp_demo").read_text())
doc["degenerations"] = []
E = load_site(doc)
print("empty registry, OB3(pt):", build_OB3(E).invariants("id_pt"))
