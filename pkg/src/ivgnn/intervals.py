"""Lattice algebra on closed subintervals of the unit interval.

The value universe is U = {[lo, hi] : 0 <= lo <= hi <= 1}.  Three meet/join
pairs act on U, each inducing a different aggregation behaviour over multisets
of intervals:

* ``agr_0``   componentwise minimum / maximum of endpoints.
* ``agr_e``   clipped intersection; disjoint inputs collapse onto the smaller
  upper endpoint as a degenerate interval.
* ``agr_new`` intersection that widens to an upper bound of 1 whenever inputs
  fail to overlap (or already touch 1), so disjointness stays visible
  downstream instead of collapsing.

``leq_new`` is the total order used with the new pair: intervals with larger
lower endpoints sit lower in the order; ties compare upper endpoints.  The
degenerate interval [1, 1] is the least element and [0, 1] the greatest.

``agr`` folds a variant's meet over the multiset sorted in the canonical
order (ascending lo, ties by hi), which makes aggregation permutation
invariant by construction.  ``check_axioms`` and ``check_order_properties``
verify the algebra on endpoint grids and produce replayable counterexamples
for the laws that are reported rather than asserted.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Callable, Iterable, Sequence

import numpy as np

#: Tolerance of the "upper endpoint differs from 1" test used by the new
#: meet/join pair.  Values within this distance of 1 count as 1.
ONE_TOL = 1e-12

_COUNTEREXAMPLE_CAP = 50
_EXHAUSTIVE_TRIPLE_LIMIT = 50_000
_SAMPLED_TRIPLES = 5_000
_SAMPLED_CHAINS = 50_000
_CHECK_SEED = 20260817


class EmptyAggregationError(ValueError):
    """Raised when aggregation is asked to combine an empty multiset."""


class NormalizationRangeError(ValueError):
    """Raised when normalization statistics do not span a positive range."""


class Aggregator(enum.Enum):
    """The three interval aggregation variants."""

    AGR_0 = "agr_0"
    AGR_E = "agr_e"
    AGR_NEW = "agr_new"

    @classmethod
    def from_name(cls, name: str) -> "Aggregator":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown aggregator {name!r}")


@dataclasses.dataclass(frozen=True, order=False)
class UnitInterval:
    """A closed interval [lo, hi] with 0 <= lo <= hi <= 1."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"non-finite endpoints [{self.lo}, {self.hi}]")
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"invalid unit interval [{self.lo}, {self.hi}]")

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def degenerate(self) -> bool:
        return self.lo == self.hi

    def __repr__(self) -> str:
        return f"[{self.lo:g}, {self.hi:g}]"


# ---------------------------------------------------------------------------
# order
# ---------------------------------------------------------------------------

def leq_new(a: UnitInterval, b: UnitInterval) -> bool:
    """Total order for the new pair: a precedes b when b.lo < a.lo, with
    ties decided by a.hi <= b.hi.  [1, 1] is least, [0, 1] greatest."""
    return b.lo < a.lo or (a.lo == b.lo and a.hi <= b.hi)


def order_bottom() -> UnitInterval:
    """Least element of the total order."""
    return UnitInterval(1.0, 1.0)


def order_top() -> UnitInterval:
    """Greatest element of the total order."""
    return UnitInterval(0.0, 1.0)


# ---------------------------------------------------------------------------
# meets and joins
# ---------------------------------------------------------------------------

def meet_0(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Componentwise minimum of endpoints."""
    return UnitInterval(min(a.lo, b.lo), min(a.hi, b.hi))


def join_0(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Componentwise maximum of endpoints."""
    return UnitInterval(max(a.lo, b.lo), max(a.hi, b.hi))


def meet_e(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Intersection when the inputs overlap; otherwise the degenerate
    interval at the smaller upper endpoint."""
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo <= hi:
        return UnitInterval(lo, hi)
    return UnitInterval(hi, hi)


def join_e(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Case-analysed hull: two degenerate inputs take the larger point; a
    degenerate input strictly below a proper one yields the proper one;
    otherwise the convex hull of the endpoints."""
    if a.degenerate and b.degenerate:
        m = max(a.hi, b.hi)
        return UnitInterval(m, m)
    if a.degenerate and a.hi < b.lo < b.hi:
        return UnitInterval(max(a.lo, b.lo), max(a.hi, b.hi))
    return UnitInterval(min(a.lo, b.lo), max(a.hi, b.hi))


def meet_new(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Intersection while the inputs overlap and stay clear of 1; once they
    are disjoint (or an upper endpoint reaches 1) the result keeps the larger
    lower endpoint and pins the upper endpoint at 1."""
    lo = max(a.lo, b.lo)
    if lo <= min(a.hi, b.hi) and max(a.hi, b.hi) < 1.0 - ONE_TOL:
        return UnitInterval(lo, min(a.hi, b.hi))
    return UnitInterval(lo, 1.0)


def join_new(a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """Convex hull while upper endpoints stay clear of 1; otherwise the
    smaller endpoints on both sides."""
    if max(a.hi, b.hi) < 1.0 - ONE_TOL:
        return UnitInterval(min(a.lo, b.lo), max(a.hi, b.hi))
    return UnitInterval(min(a.lo, b.lo), min(a.hi, b.hi))


_MEETS: dict[Aggregator, Callable[[UnitInterval, UnitInterval], UnitInterval]] = {
    Aggregator.AGR_0: meet_0,
    Aggregator.AGR_E: meet_e,
    Aggregator.AGR_NEW: meet_new,
}

_JOINS: dict[Aggregator, Callable[[UnitInterval, UnitInterval], UnitInterval]] = {
    Aggregator.AGR_0: join_0,
    Aggregator.AGR_E: join_e,
    Aggregator.AGR_NEW: join_new,
}


def meet(variant: Aggregator, a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """The variant's binary meet."""
    return _MEETS[variant](a, b)


def join(variant: Aggregator, a: UnitInterval, b: UnitInterval) -> UnitInterval:
    """The variant's binary join."""
    return _JOINS[variant](a, b)


def aggregation_bounds(variant: Aggregator) -> tuple[UnitInterval, UnitInterval]:
    """The (least, greatest) extreme elements fixed by the variant's
    aggregation: copies of either extreme aggregate back to the extreme."""
    if variant is Aggregator.AGR_NEW:
        return order_bottom(), order_top()
    return UnitInterval(0.0, 0.0), UnitInterval(1.0, 1.0)


def agr(variant: Aggregator, items: Iterable[UnitInterval]) -> UnitInterval:
    """Aggregate a non-empty multiset: left-fold of the variant's meet over
    the items sorted ascending by (lo, hi).  The sort fixes the fold order, so
    the result does not depend on the order items arrive in."""
    seq = sorted(items, key=lambda i: (i.lo, i.hi))
    if not seq:
        raise EmptyAggregationError("cannot aggregate an empty multiset")
    op = _MEETS[variant]
    acc = seq[0]
    for item in seq[1:]:
        acc = op(acc, item)
    return acc


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def normalize(raw_lo: float, raw_hi: float, stats_min: float, stats_max: float) -> UnitInterval:
    """Affinely map a raw interval into U using observed statistics, clamping
    at both ends.  ``stats_min`` must be strictly below ``stats_max``."""
    if not (math.isfinite(stats_min) and math.isfinite(stats_max)) or not stats_min < stats_max:
        raise NormalizationRangeError(
            f"normalization stats must satisfy min < max, got [{stats_min}, {stats_max}]"
        )
    if raw_lo > raw_hi:
        raise ValueError(f"raw interval has lo > hi: [{raw_lo}, {raw_hi}]")
    span = stats_max - stats_min
    lo = min(max((raw_lo - stats_min) / span, 0.0), 1.0)
    hi = min(max((raw_hi - stats_min) / span, 0.0), 1.0)
    return UnitInterval(lo, hi)


# ---------------------------------------------------------------------------
# vectorized kernels (used by the grid checkers; cross-checked against the
# scalar operators in the test suite)
# ---------------------------------------------------------------------------

def vec_meet(variant, lo_a, hi_a, lo_b, hi_b):
    """Elementwise meet over endpoint arrays."""
    if variant is Aggregator.AGR_0:
        return np.minimum(lo_a, lo_b), np.minimum(hi_a, hi_b)
    lo = np.maximum(lo_a, lo_b)
    hi = np.minimum(hi_a, hi_b)
    if variant is Aggregator.AGR_E:
        overlap = lo <= hi
        return np.where(overlap, lo, hi), hi
    overlap = (lo <= hi) & (np.maximum(hi_a, hi_b) < 1.0 - ONE_TOL)
    return lo, np.where(overlap, hi, 1.0)


def vec_join(variant, lo_a, hi_a, lo_b, hi_b):
    """Elementwise join over endpoint arrays."""
    if variant is Aggregator.AGR_0:
        return np.maximum(lo_a, lo_b), np.maximum(hi_a, hi_b)
    if variant is Aggregator.AGR_E:
        both_deg = (lo_a == hi_a) & (lo_b == hi_b)
        a_below = (lo_a == hi_a) & (hi_a < lo_b) & (lo_b < hi_b)
        lo = np.where(
            both_deg,
            np.maximum(hi_a, hi_b),
            np.where(a_below, np.maximum(lo_a, lo_b), np.minimum(lo_a, lo_b)),
        )
        return lo, np.maximum(hi_a, hi_b)
    clear = np.maximum(hi_a, hi_b) < 1.0 - ONE_TOL
    return (
        np.minimum(lo_a, lo_b),
        np.where(clear, np.maximum(hi_a, hi_b), np.minimum(hi_a, hi_b)),
    )


def vec_leq_new(lo_a, hi_a, lo_b, hi_b):
    """Elementwise total-order test a <= b."""
    return (lo_b < lo_a) | ((lo_a == lo_b) & (hi_a <= hi_b))


def unit_grid(step: float) -> np.ndarray:
    """Evenly spaced endpoint values covering [0, 1] with the given step.
    Endpoints 0 and 1 are exact."""
    if not 0.0 < step <= 0.25:
        raise ValueError(f"grid step must be in (0, 0.25], got {step}")
    k = round(1.0 / step)
    if abs(k * step - 1.0) > 1e-9:
        raise ValueError(f"grid step {step} does not divide 1")
    return np.linspace(0.0, 1.0, k + 1)


def unit_grid_intervals(step: float) -> tuple[np.ndarray, np.ndarray]:
    """All intervals with both endpoints on the grid, as (lo, hi) arrays."""
    values = unit_grid(step)
    iu, ju = np.triu_indices(values.size)
    return values[iu], values[ju]


# ---------------------------------------------------------------------------
# law registry and replay
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class Counterexample:
    """A recorded law violation: the law name and the operand intervals."""

    law: str
    operands: tuple[tuple[float, float], ...]


def _valid(i: UnitInterval) -> bool:
    return 0.0 <= i.lo <= i.hi <= 1.0


def law_holds(law: str, variant: Aggregator, operands: Sequence[tuple[float, float]]) -> bool:
    """Evaluate a named law on concrete operands with the scalar operators.
    Used to replay recorded counterexamples."""
    ops = [UnitInterval(lo, hi) for lo, hi in operands]
    if law == "closure_meet":
        try:
            return _valid(meet(variant, ops[0], ops[1]))
        except ValueError:
            return False
    if law == "closure_join":
        try:
            return _valid(join(variant, ops[0], ops[1]))
        except ValueError:
            return False
    if law == "idempotency":
        (i,) = ops
        return (
            meet(variant, i, i) == i
            and join(variant, i, i) == i
            and agr(variant, [i]) == i
        )
    if law == "commutativity_meet":
        a, b = ops
        return meet(variant, a, b) == meet(variant, b, a)
    if law == "boundary":
        (i,) = ops
        return all(agr(variant, [i] * n) == i for n in (1, 2, 5))
    if law == "fold_symmetry":
        import itertools

        base = agr(variant, ops)
        return all(agr(variant, perm) == base for perm in itertools.permutations(ops))
    if law == "monotonicity":
        a, b, a2, b2 = ops
        if not (leq_new(a, a2) and leq_new(b, b2)):
            return True
        return leq_new(agr(variant, [a, b]), agr(variant, [a2, b2]))
    if law == "absorption_meet":
        a, b = ops
        return meet(variant, a, join(variant, a, b)) == a
    if law == "absorption_join":
        a, b = ops
        return join(variant, a, meet(variant, a, b)) == a
    if law == "associativity_meet":
        a, b, c = ops
        return meet(variant, meet(variant, a, b), c) == meet(variant, a, meet(variant, b, c))
    if law == "associativity_join":
        a, b, c = ops
        return join(variant, join(variant, a, b), c) == join(variant, a, join(variant, b, c))
    if law == "order_min_agreement":
        a, b = ops
        order_min = a if leq_new(a, b) else b
        return meet(variant, a, b) == order_min
    if law == "order_max_agreement":
        a, b = ops
        order_max = b if leq_new(a, b) else a
        return join(variant, a, b) == order_max
    raise ValueError(f"unknown law {law!r}")


# ---------------------------------------------------------------------------
# axiom checker
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class AxiomReport:
    """Outcome of a grid sweep over one aggregation variant.

    The boolean fields are the asserted axioms; the two counters are laws the
    algebra is not expected to satisfy everywhere and are reported only.
    ``counterexamples`` stores up to 50 replayable failures per law (the
    counters remain exact)."""

    variant: Aggregator
    grid_step: float
    closure_ok: bool
    boundary_ok: bool
    idempotency_ok: bool
    commutativity_ok: bool
    fold_symmetry_ok: bool
    monotonicity_violations: int
    lattice_law_violations: int
    counterexamples: tuple[Counterexample, ...]


@dataclasses.dataclass(frozen=True)
class OrderReport:
    """Poset properties of the total order on an endpoint grid."""

    grid_step: float
    reflexive_ok: bool
    antisymmetric_ok: bool
    transitive_ok: bool
    total_ok: bool
    bounds_ok: bool

    @property
    def all_ok(self) -> bool:
        return (
            self.reflexive_ok
            and self.antisymmetric_ok
            and self.transitive_ok
            and self.total_ok
            and self.bounds_ok
        )


class _Recorder:
    """Accumulates capped per-law counterexamples."""

    def __init__(self) -> None:
        self.items: list[Counterexample] = []
        self._per_law: dict[str, int] = {}

    def record(self, law: str, mask: np.ndarray, *operands) -> None:
        """``operands`` are (lo_array, hi_array) pairs aligned with ``mask``."""
        hits = np.flatnonzero(mask)
        room = _COUNTEREXAMPLE_CAP - self._per_law.get(law, 0)
        for flat in hits[: max(room, 0)]:
            ops = tuple((float(lo[flat]), float(hi[flat])) for lo, hi in operands)
            self.items.append(Counterexample(law, ops))
        self._per_law[law] = self._per_law.get(law, 0) + int(hits.size)


def _vec_valid(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return (lo >= 0.0) & (hi <= 1.0) & (lo <= hi) & np.isfinite(lo) & np.isfinite(hi)


def check_axioms(variant: Aggregator, grid_step: float) -> AxiomReport:
    """Sweep the aggregation axioms over the endpoint grid.

    Pairwise laws (closure, idempotency, commutativity, absorption) run
    exhaustively.  Associativity runs exhaustively with an outer loop over the
    first operand.  Fold symmetry is exhaustive over all grid triples when the
    triple count is small, otherwise over a seeded sample; monotonicity is
    checked on seeded sampled chains.  For the new variant the meet/join are
    also compared against the minimum/maximum under the total order (the
    algebra deliberately departs from them on disjoint inputs), counted into
    ``lattice_law_violations``.
    """
    lo, hi = unit_grid_intervals(grid_step)
    m = lo.size
    rec = _Recorder()

    # all ordered pairs
    la, ha = np.repeat(lo, m), np.repeat(hi, m)
    lb, hb = np.tile(lo, m), np.tile(hi, m)

    meet_lo, meet_hi = vec_meet(variant, la, ha, lb, hb)
    join_lo, join_hi = vec_join(variant, la, ha, lb, hb)

    bad = ~_vec_valid(meet_lo, meet_hi)
    rec.record("closure_meet", bad, (la, ha), (lb, hb))
    closure_ok = not bad.any()
    bad = ~_vec_valid(join_lo, join_hi)
    rec.record("closure_join", bad, (la, ha), (lb, hb))
    closure_ok = closure_ok and not bad.any()

    mlo, mhi = vec_meet(variant, lo, hi, lo, hi)
    jlo, jhi = vec_join(variant, lo, hi, lo, hi)
    bad = (mlo != lo) | (mhi != hi) | (jlo != lo) | (jhi != hi)
    singles_ok = all(agr(variant, [UnitInterval(l, h)]) == UnitInterval(l, h) for l, h in zip(lo, hi))
    rec.record("idempotency", bad, (lo, hi))
    idempotency_ok = bool(singles_ok and not bad.any())

    rlo, rhi = vec_meet(variant, lb, hb, la, ha)
    bad = (meet_lo != rlo) | (meet_hi != rhi)
    rec.record("commutativity_meet", bad, (la, ha), (lb, hb))
    commutativity_ok = not bad.any()

    boundary_ok = True
    for extreme in aggregation_bounds(variant):
        for n in (1, 2, 5):
            if agr(variant, [extreme] * n) != extreme:
                boundary_ok = False
                rec.record("boundary", np.array([True]),
                           (np.array([extreme.lo]), np.array([extreme.hi])))
                break

    fold_symmetry_ok = _check_fold_symmetry(variant, lo, hi, rec)
    monotonicity_violations = _check_monotonicity(variant, lo, hi, rec)
    lattice_law_violations = _check_lattice_laws(
        variant, lo, hi, la, ha, lb, hb, meet_lo, meet_hi, join_lo, join_hi, rec
    )

    return AxiomReport(
        variant=variant,
        grid_step=grid_step,
        closure_ok=bool(closure_ok),
        boundary_ok=bool(boundary_ok),
        idempotency_ok=bool(idempotency_ok),
        commutativity_ok=bool(commutativity_ok),
        fold_symmetry_ok=bool(fold_symmetry_ok),
        monotonicity_violations=int(monotonicity_violations),
        lattice_law_violations=int(lattice_law_violations),
        counterexamples=tuple(rec.items),
    )


def _check_fold_symmetry(variant, lo, hi, rec) -> bool:
    import itertools

    m = lo.size
    if m**3 <= _EXHAUSTIVE_TRIPLE_LIMIT:
        triples = np.indices((m, m, m)).reshape(3, -1).T
    else:
        rng = np.random.default_rng(_CHECK_SEED)
        triples = rng.integers(0, m, size=(_SAMPLED_TRIPLES, 3))
    ok = True
    for i, j, k in triples:
        items = [
            UnitInterval(float(lo[i]), float(hi[i])),
            UnitInterval(float(lo[j]), float(hi[j])),
            UnitInterval(float(lo[k]), float(hi[k])),
        ]
        base = agr(variant, items)
        for perm in itertools.permutations(items):
            if agr(variant, perm) != base:
                ok = False
                rec.record(
                    "fold_symmetry",
                    np.array([True]),
                    *(
                        (np.array([it.lo]), np.array([it.hi]))
                        for it in items
                    ),
                )
                break
    return ok


def _check_monotonicity(variant, lo, hi, rec) -> int:
    rng = np.random.default_rng(_CHECK_SEED + 1)
    m = lo.size
    idx = rng.integers(0, m, size=(4, _SAMPLED_CHAINS))
    la, ha = lo[idx[0]], hi[idx[0]]
    lb, hb = lo[idx[1]], hi[idx[1]]
    la2, ha2 = lo[idx[2]], hi[idx[2]]
    lb2, hb2 = lo[idx[3]], hi[idx[3]]
    chain = vec_leq_new(la, ha, la2, ha2) & vec_leq_new(lb, hb, lb2, hb2)
    out_lo, out_hi = vec_meet(variant, la, ha, lb, hb)
    out2_lo, out2_hi = vec_meet(variant, la2, ha2, lb2, hb2)
    bad = chain & ~vec_leq_new(out_lo, out_hi, out2_lo, out2_hi)
    rec.record("monotonicity", bad, (la, ha), (lb, hb), (la2, ha2), (lb2, hb2))
    return int(bad.sum())


def _check_lattice_laws(
    variant, lo, hi, la, ha, lb, hb, meet_lo, meet_hi, join_lo, join_hi, rec
) -> int:
    total = 0

    alo, ahi = vec_meet(variant, la, ha, join_lo, join_hi)
    bad = (alo != la) | (ahi != ha)
    rec.record("absorption_meet", bad, (la, ha), (lb, hb))
    total += int(bad.sum())

    alo, ahi = vec_join(variant, la, ha, meet_lo, meet_hi)
    bad = (alo != la) | (ahi != ha)
    rec.record("absorption_join", bad, (la, ha), (lb, hb))
    total += int(bad.sum())

    # associativity, exhaustive with an outer loop over the first operand
    for op_pair, vec_op, law in (
        ((meet_lo, meet_hi), vec_meet, "associativity_meet"),
        ((join_lo, join_hi), vec_join, "associativity_join"),
    ):
        bc_lo, bc_hi = op_pair  # op(B, C) for every ordered pair, precomputed
        m = lo.size
        for a in range(m):
            ab_lo, ab_hi = vec_op(variant, lo[a], hi[a], lo, hi)
            lhs_lo, lhs_hi = vec_op(
                variant, np.repeat(ab_lo, m), np.repeat(ab_hi, m), lb, hb
            )
            rhs_lo, rhs_hi = vec_op(variant, lo[a], hi[a], bc_lo, bc_hi)
            bad = (lhs_lo != rhs_lo) | (lhs_hi != rhs_hi)
            if bad.any():
                rec.record(
                    law,
                    bad,
                    (np.full(bad.size, lo[a]), np.full(bad.size, hi[a])),
                    (la, ha),
                    (lb, hb),
                )
                total += int(bad.sum())

    if variant is Aggregator.AGR_NEW:
        a_leq_b = vec_leq_new(la, ha, lb, hb)
        min_lo, min_hi = np.where(a_leq_b, la, lb), np.where(a_leq_b, ha, hb)
        max_lo, max_hi = np.where(a_leq_b, lb, la), np.where(a_leq_b, hb, ha)
        bad = (meet_lo != min_lo) | (meet_hi != min_hi)
        rec.record("order_min_agreement", bad, (la, ha), (lb, hb))
        total += int(bad.sum())
        bad = (join_lo != max_lo) | (join_hi != max_hi)
        rec.record("order_max_agreement", bad, (la, ha), (lb, hb))
        total += int(bad.sum())

    return total


def check_order_properties(grid_step: float) -> OrderReport:
    """Verify that the total order is a reflexive, antisymmetric, transitive
    and total relation on the grid, with [1, 1] below and [0, 1] above
    everything."""
    lo, hi = unit_grid_intervals(grid_step)
    rel = vec_leq_new(lo[:, None], hi[:, None], lo[None, :], hi[None, :])

    reflexive_ok = bool(np.diagonal(rel).all())
    both = rel & rel.T
    antisymmetric_ok = bool((both == np.eye(lo.size, dtype=bool)).all())
    total_ok = bool((rel | rel.T).all())
    reach = (rel.astype(np.int32) @ rel.astype(np.int32)) > 0
    transitive_ok = bool(not (reach & ~rel).any())

    bottom = np.flatnonzero((lo == 1.0) & (hi == 1.0))
    top = np.flatnonzero((lo == 0.0) & (hi == 1.0))
    bounds_ok = bool(
        bottom.size == 1 and top.size == 1
        and rel[bottom[0], :].all() and rel[:, top[0]].all()
    )
    return OrderReport(
        grid_step=grid_step,
        reflexive_ok=reflexive_ok,
        antisymmetric_ok=antisymmetric_ok,
        transitive_ok=transitive_ok,
        total_ok=total_ok,
        bounds_ok=bounds_ok,
    )


# ---------------------------------------------------------------------------
# plain-text report serialization
# ---------------------------------------------------------------------------

def _flag(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def format_axiom_report(report: AxiomReport) -> str:
    bot, top = aggregation_bounds(report.variant)
    lines = [
        f"aggregator {report.variant.value} (grid step {report.grid_step:g})",
        f"  closure        {_flag(report.closure_ok)}",
        f"  boundary       {_flag(report.boundary_ok)}  (extremes {bot} and {top})",
        f"  idempotency    {_flag(report.idempotency_ok)}",
        f"  commutativity  {_flag(report.commutativity_ok)}",
        f"  fold symmetry  {_flag(report.fold_symmetry_ok)}",
        f"  monotonicity   {report.monotonicity_violations} violation(s), reported only",
        f"  lattice laws   {report.lattice_law_violations} violation(s), reported only",
    ]
    if report.counterexamples:
        lines.append(f"  counterexamples recorded: {len(report.counterexamples)}")
    return "\n".join(lines)


def format_order_report(report: OrderReport) -> str:
    return "\n".join(
        [
            f"interval order (grid step {report.grid_step:g})",
            f"  reflexive      {_flag(report.reflexive_ok)}",
            f"  antisymmetric  {_flag(report.antisymmetric_ok)}",
            f"  transitive     {_flag(report.transitive_ok)}",
            f"  total          {_flag(report.total_ok)}",
            f"  global bounds  {_flag(report.bounds_ok)}  ([1, 1] least, [0, 1] greatest)",
        ]
    )
