"""The four soft-output estimators side by side.

Shows the exact cluster gap, its early-stopped variant, and the two
growth-based variants on decoded samples, then reproduces the canonical
under-estimation example for the growth-based gap without refinement.
"""

from softgap import (
    ClusterState,
    DecodingGraph,
    Edge,
    SCALED_PER_NAT,
    SeedSpec,
    bounded_cluster_gap,
    build_phenomenological,
    cluster_gap,
    contract,
    db_to_scaled,
    decode,
    extra_cluster_gap,
    extra_cluster_gap_cg,
    sample_syndrome,
    scaled_to_db,
)

EPS = db_to_scaled(20.0)   # 20 dB confidence threshold


def show(name, r):
    gap = "undefined" if r.value is None else f"{scaled_to_db(r.value):7.2f} dB"
    extra = (f" visited={r.visited_nodes}" if r.kind in ("cluster", "bounded")
             else f" newly_covered={r.extra_nodes}")
    print(f"  {name:<22} {gap}{extra}")


g = build_phenomenological(d=7, rounds=7, p=0.01)
for idx in (0, 2, 4):
    s = sample_syndrome(g, SeedSpec(7, idx))
    cs = decode(g, s)
    view = contract(g, cs)
    print(f"\nsample {idx}: {len(s.events)} events")
    show("full search", cluster_gap(view))
    show("early-stopped search", bounded_cluster_gap(view, EPS))
    show("growth, plain", extra_cluster_gap(g, cs, EPS, view=view))
    show("growth, refined", extra_cluster_gap_cg(g, cs, EPS, view=view))

# Canonical under-estimation case: two clusters evenly spaced between the
# boundaries.  Plain growth connects everything at 2 nat per hop and reports
# 2 nat, far below the true 6 nat crossing cost; the refined variant walks
# the covered region and reports the true distance.
nat = lambda x: round(x * SCALED_PER_NAT)
chain = DecodingGraph(4, (2, 3), [Edge(0, 2, nat(2)), Edge(0, 1, nat(2)),
                                  Edge(1, 3, nat(2))])
cs = ClusterState.from_partition(chain, [[0], [1]])
view = contract(chain, cs)
print("\nevenly spaced chain (true crossing cost 6 nat ~ 26 dB):")
show("full search", cluster_gap(view))
show("early-stopped search", bounded_cluster_gap(view, EPS))
show("growth, plain", extra_cluster_gap(chain, cs, EPS, view=view))
show("growth, refined", extra_cluster_gap_cg(chain, cs, EPS, view=view))
print("\nplain growth under-reports below the threshold (by design it never"
      "\nmisses a low-confidence sample); the refined variant is exact.")
