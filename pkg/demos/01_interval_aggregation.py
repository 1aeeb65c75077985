#!/usr/bin/env python3
"""A tour of the three interval aggregation operators.

Node features here are closed intervals [lo, hi] inside [0, 1].  An
aggregator folds a multiset of such intervals into one interval; the three
variants trade expressiveness against algebraic strength:

* ``agr_0``   componentwise minimum — always defined, but blind to overlap
* ``agr_e``   clipped intersection — sees overlap, collapses when disjoint
* ``agr_new`` order-theoretic meet — keeps disjointness observable by
              keeping the larger lower endpoint and widening hi to 1

Run:  python3 demos/01_interval_aggregation.py
"""

from ivgnn.intervals import (
    Aggregator,
    UnitInterval,
    agr,
    check_axioms,
    check_order_properties,
    format_axiom_report,
    format_order_report,
    leq_new,
)


def I(lo, hi):
    return UnitInterval(lo, hi)


def show(title, inputs):
    cells = "  ".join(f"{v.value}={agr(v, inputs)}" for v in Aggregator)
    print(f"{title:<28} {inputs}\n{'':<28} {cells}\n")


print("=" * 72)
print("1. The same pair of intervals under each aggregator")
print("=" * 72)
show("nested", (I(0.1, 0.2), I(0.1, 0.3)))
show("overlapping", (I(0.1, 0.2), I(0.15, 0.3)))
show("disjoint", (I(0.1, 0.2), I(0.3, 0.4)))
show("touching at a point", (I(0.1, 0.2), I(0.2, 0.3)))

print("=" * 72)
print("2. Why the finer aggregators matter: multisets the coarser ones merge")
print("=" * 72)
s1, s2 = [I(0.1, 0.2), I(0.1, 0.3)], [I(0.1, 0.2), I(0.15, 0.3)]
print(f"agr_0 cannot tell  {s1} from {s2}:")
print(f"  agr_0: {agr(Aggregator.AGR_0, s1)} == {agr(Aggregator.AGR_0, s2)}")
print(f"  agr_e: {agr(Aggregator.AGR_E, s1)} != {agr(Aggregator.AGR_E, s2)}\n")

s3, s4 = [I(0.1, 0.2), I(0.3, 0.4)], [I(0.1, 0.2), I(0.2, 0.3)]
print(f"agr_e cannot tell  {s3} from {s4}:")
print(f"  agr_e:   {agr(Aggregator.AGR_E, s3)} == {agr(Aggregator.AGR_E, s4)}")
print(f"  agr_new: {agr(Aggregator.AGR_NEW, s3)} != {agr(Aggregator.AGR_NEW, s4)}\n")

print("=" * 72)
print("3. The total order behind agr_new (width-then-left comparison)")
print("=" * 72)
pairs = [(I(0.2, 0.4), I(0.1, 0.5)), (I(0.2, 0.4), I(0.3, 0.5)), (I(0.0, 1.0), I(0.5, 0.5))]
for a, b in pairs:
    rel = "<=" if leq_new(a, b) else ">"
    print(f"  {a} {rel} {b}")
print()

print("=" * 72)
print("4. Axiom sweep on a coarse endpoint grid (0.1 steps)")
print("=" * 72)
for variant in Aggregator:
    print(format_axiom_report(check_axioms(variant, 0.1)))
    print()
print(format_order_report(check_order_properties(0.1)))
