"""Reverse-mode automatic differentiation over numpy float64 arrays.

A :class:`Tape` records every op output in creation order, which is already a
topological order of the computation DAG, so backward is a single reverse
sweep that visits each node exactly once.  Leaf tensors (parameters, inputs)
are not recorded; gradients accumulate into their ``grad`` buffers.

Every op checks its output for non-finite values immediately, so a NaN or
overflow fails at the op that produced it rather than surfacing later in a
loss.

Gradient conventions at non-differentiable points (each is a valid
subgradient, chosen to be deterministic):

* ``relu`` and ``clip01`` pass zero gradient at their kinks and outside the
  clip range;
* ``minimum`` / ``maximum`` route the gradient to their first argument on
  ties;
* the interval aggregation kernel routes each output endpoint's gradient to
  the canonically first input attaining it: inputs are ranked by
  (lo, hi, slot), matching the sorted left-fold that defines the scalar
  aggregators.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .intervals import ONE_TOL, Aggregator, EmptyAggregationError

__all__ = [
    "Tensor",
    "Tape",
    "BatchNormState",
    "Adam",
    "CheckpointError",
    "lr_schedule",
    "save_checkpoint",
    "load_checkpoint",
    "add",
    "add_const",
    "mul_const",
    "scale",
    "linear",
    "relu",
    "sigmoid",
    "clip01",
    "minimum",
    "maximum",
    "batchnorm",
    "dropout",
    "reshape",
    "slice_cols",
    "take_last",
    "stack_last",
    "concat",
    "sum_all",
    "segment_sum",
    "softmax_xent",
    "interval_meet_pair",
    "interval_meet_aggregate",
]


class Tensor:
    """A float64 array plus a gradient buffer.

    Leaves are built directly (``Tensor(data)``); op outputs are built by the
    op functions below and carry a backward closure.
    """

    __slots__ = ("data", "grad", "parents", "backward_fn", "op")

    def __init__(self, data) -> None:
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.parents: tuple[Tensor, ...] = ()
        self.backward_fn = None
        self.op = "leaf"

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(op={self.op}, shape={self.data.shape})"


class Tape:
    """Op-output record in creation order, plus activation accounting.

    ``activation_elements`` counts every array element produced by recorded
    ops; the complexity benchmark reads it as a memory-traffic proxy.
    """

    def __init__(self) -> None:
        self._nodes: list[Tensor] = []
        self.activation_elements: int = 0

    def __len__(self) -> int:
        return len(self._nodes)

    def _record(self, t: Tensor) -> None:
        self._nodes.append(t)
        self.activation_elements += t.data.size

    def backward(self, loss: Tensor) -> None:
        """Accumulate d(loss)/d(node) into every reachable ``grad`` buffer."""
        if loss.data.shape != ():
            raise ValueError("backward needs a scalar loss")
        if loss.backward_fn is None:
            raise ValueError("loss is a leaf; nothing to differentiate")
        loss.grad = np.ones((), dtype=np.float64)
        for node in reversed(self._nodes):
            if node.grad is not None and node.backward_fn is not None:
                node.backward_fn(node.grad)


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if t.grad is None:
        if np.shape(g) == t.data.shape:
            t.grad = np.array(g, dtype=np.float64)
            return
        t.grad = np.zeros_like(t.data)
    t.grad += g


def _grad_buffer(t: Tensor) -> np.ndarray:
    if t.grad is None:
        t.grad = np.zeros_like(t.data)
    return t.grad


def _make(tape: Tape, op: str, data: np.ndarray, parents, backward_fn) -> Tensor:
    if not np.isfinite(data).all():
        raise FloatingPointError(f"non-finite values produced by op '{op}'")
    out = Tensor(data)
    out.parents = tuple(parents)
    out.backward_fn = backward_fn
    out.op = op
    tape._record(out)
    return out


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def add(tape: Tape, a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ValueError("add requires matching shapes")

    def backward_fn(g):
        _accumulate(a, g)
        _accumulate(b, g)

    return _make(tape, "add", a.data + b.data, (a, b), backward_fn)


def add_const(tape: Tape, x: Tensor, c: float) -> Tensor:
    def backward_fn(g):
        _accumulate(x, g)

    return _make(tape, "add_const", x.data + c, (x,), backward_fn)


def mul_const(tape: Tape, x: Tensor, c) -> Tensor:
    """Multiply by a constant scalar or broadcastable constant array."""
    c = np.asarray(c, dtype=np.float64)
    data = x.data * c

    def backward_fn(g):
        _accumulate(x, np.broadcast_to(g * c, x.data.shape))

    return _make(tape, "mul_const", data, (x,), backward_fn)


def scale(tape: Tape, x: Tensor, s: Tensor) -> Tensor:
    """Multiply by a scalar tensor (gradient flows to both operands)."""
    if s.data.shape != ():
        raise ValueError("scale expects a scalar tensor")

    def backward_fn(g):
        _accumulate(x, g * s.data)
        _accumulate(s, np.asarray((g * x.data).sum()))

    return _make(tape, "scale", x.data * s.data, (x, s), backward_fn)


def linear(tape: Tape, x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Affine map ``x @ w + b`` with x: [n, d_in], w: [d_in, d_out]."""
    data = x.data @ w.data + b.data

    def backward_fn(g):
        _accumulate(x, g @ w.data.T)
        _accumulate(w, x.data.T @ g)
        _accumulate(b, g.sum(axis=0))

    return _make(tape, "linear", data, (x, w, b), backward_fn)


# ---------------------------------------------------------------------------
# elementwise nonlinearities
# ---------------------------------------------------------------------------

def relu(tape: Tape, x: Tensor) -> Tensor:
    mask = x.data > 0

    def backward_fn(g):
        _accumulate(x, g * mask)

    return _make(tape, "relu", np.where(mask, x.data, 0.0), (x,), backward_fn)


def sigmoid(tape: Tape, x: Tensor) -> Tensor:
    # with t = exp(-|z|) <= 1 the exponential never overflows, and both sign
    # branches share it: z >= 0 -> 1/(1+t), z < 0 -> t/(1+t)
    z = x.data
    t = np.exp(-np.abs(z))
    s = np.where(z >= 0, 1.0, t) / (1.0 + t)

    def backward_fn(g):
        _accumulate(x, g * s * (1.0 - s))

    return _make(tape, "sigmoid", s, (x,), backward_fn)


def clip01(tape: Tape, x: Tensor) -> Tensor:
    inside = (x.data > 0.0) & (x.data < 1.0)

    def backward_fn(g):
        _accumulate(x, g * inside)

    return _make(tape, "clip01", np.clip(x.data, 0.0, 1.0), (x,), backward_fn)


def minimum(tape: Tape, a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; ties route the gradient to ``a``."""
    take_a = a.data <= b.data

    def backward_fn(g):
        _accumulate(a, g * take_a)
        _accumulate(b, g * ~take_a)

    return _make(tape, "minimum", np.where(take_a, a.data, b.data), (a, b), backward_fn)


def maximum(tape: Tape, a: Tensor, b: Tensor) -> Tensor:
    """Elementwise max; ties route the gradient to ``a``."""
    take_a = a.data >= b.data

    def backward_fn(g):
        _accumulate(a, g * take_a)
        _accumulate(b, g * ~take_a)

    return _make(tape, "maximum", np.where(take_a, a.data, b.data), (a, b), backward_fn)


# ---------------------------------------------------------------------------
# batch normalization
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class BatchNormState:
    """Running statistics (cumulative averages of per-batch mean and *biased*
    variance) plus the number of updates applied."""

    running_mean: np.ndarray
    running_var: np.ndarray
    update_count: int = 0

    @classmethod
    def fresh(cls, dim: int) -> "BatchNormState":
        return cls(
            running_mean=np.zeros(dim, dtype=np.float64),
            running_var=np.ones(dim, dtype=np.float64),
        )


BN_EPS = 1e-5


def batchnorm(
    tape: Tape,
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    state: BatchNormState,
    train: bool,
) -> Tensor:
    """Per-feature normalization of x: [n, d].

    Training normalizes by batch statistics (biased variance) and folds them
    into ``state`` as a cumulative average; evaluation normalizes by the
    stored running statistics and never touches ``state``.
    """
    if train:
        n = x.data.shape[0]
        mu = x.data.mean(axis=0)
        var = x.data.var(axis=0)  # biased: divides by n
        inv_std = 1.0 / np.sqrt(var + BN_EPS)
        xhat = (x.data - mu) * inv_std

        state.update_count += 1
        c = state.update_count
        state.running_mean += (mu - state.running_mean) / c
        state.running_var += (var - state.running_var) / c

        def backward_fn(g):
            dxhat = g * gamma.data
            dvar = (dxhat * (x.data - mu) * -0.5 * inv_std**3).sum(axis=0)
            dmu = (-dxhat * inv_std).sum(axis=0) + dvar * (-2.0 / n) * (x.data - mu).sum(axis=0)
            dx = dxhat * inv_std + dvar * 2.0 * (x.data - mu) / n + dmu / n
            _accumulate(x, dx)
            _accumulate(gamma, (g * xhat).sum(axis=0))
            _accumulate(beta, g.sum(axis=0))

    else:
        inv_std = 1.0 / np.sqrt(state.running_var + BN_EPS)
        xhat = (x.data - state.running_mean) * inv_std

        def backward_fn(g):
            _accumulate(x, g * gamma.data * inv_std)
            _accumulate(gamma, (g * xhat).sum(axis=0))
            _accumulate(beta, g.sum(axis=0))

    data = gamma.data * xhat + beta.data
    return _make(tape, "batchnorm", data, (x, gamma, beta), backward_fn)


def dropout(tape: Tape, x: Tensor, rate: float, rng: np.random.Generator | None, train: bool) -> Tensor:
    """Inverted dropout: surviving entries are rescaled by 1/(1-rate) so the
    expectation matches evaluation, where this is the identity.  The rng is
    consumed only when training with rate > 0."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must lie in [0, 1)")
    if not train or rate == 0.0:
        def backward_fn(g):
            _accumulate(x, g)

        return _make(tape, "dropout", x.data.copy(), (x,), backward_fn)

    if rng is None:
        raise ValueError("training-mode dropout needs an rng")
    keep = (rng.random(x.data.shape) >= rate) / (1.0 - rate)

    def backward_fn(g):
        _accumulate(x, g * keep)

    return _make(tape, "dropout", x.data * keep, (x,), backward_fn)


# ---------------------------------------------------------------------------
# shape plumbing
# ---------------------------------------------------------------------------

def reshape(tape: Tape, x: Tensor, shape: tuple[int, ...]) -> Tensor:
    def backward_fn(g):
        _accumulate(x, g.reshape(x.data.shape))

    return _make(tape, "reshape", x.data.reshape(shape), (x,), backward_fn)


def slice_cols(tape: Tape, x: Tensor, start: int, stop: int) -> Tensor:
    """Columns [start, stop) of a 2-d tensor."""
    def backward_fn(g):
        buf = _grad_buffer(x)
        buf[:, start:stop] += g

    return _make(tape, "slice_cols", x.data[:, start:stop].copy(), (x,), backward_fn)


def take_last(tape: Tape, x: Tensor, index: int) -> Tensor:
    """Select x[..., index] from the trailing axis."""
    def backward_fn(g):
        buf = _grad_buffer(x)
        buf[..., index] += g

    return _make(tape, "take_last", x.data[..., index].copy(), (x,), backward_fn)


def stack_last(tape: Tape, a: Tensor, b: Tensor) -> Tensor:
    """Stack two equally shaped tensors along a new trailing axis."""
    if a.data.shape != b.data.shape:
        raise ValueError("stack_last requires matching shapes")

    def backward_fn(g):
        _accumulate(a, g[..., 0])
        _accumulate(b, g[..., 1])

    return _make(tape, "stack_last", np.stack([a.data, b.data], axis=-1), (a, b), backward_fn)


def concat(tape: Tape, parts: list[Tensor], axis: int = 1) -> Tensor:
    if not parts:
        raise ValueError("concat needs at least one tensor")
    sizes = [p.data.shape[axis] for p in parts]
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    def backward_fn(g):
        for p, lo, hi in zip(parts, offsets[:-1], offsets[1:]):
            sl = [slice(None)] * g.ndim
            sl[axis] = slice(int(lo), int(hi))
            _accumulate(p, g[tuple(sl)])

    return _make(tape, "concat", np.concatenate([p.data for p in parts], axis=axis), tuple(parts), backward_fn)


def sum_all(tape: Tape, x: Tensor) -> Tensor:
    """Sum every element to a scalar."""
    def backward_fn(g):
        _accumulate(x, np.broadcast_to(g, x.data.shape))

    return _make(tape, "sum_all", np.asarray(x.data.sum()), (x,), backward_fn)


def segment_sum(tape: Tape, x: Tensor, segments: np.ndarray, num_segments: int) -> Tensor:
    """Sum rows of x into ``num_segments`` buckets given per-row segment ids."""
    segments = np.asarray(segments)
    if segments.shape != (x.data.shape[0],):
        raise ValueError("segments must assign one id per row")
    if segments.size and not (0 <= segments.min() and segments.max() < num_segments):
        raise ValueError("segment id out of range")
    data = np.zeros((num_segments,) + x.data.shape[1:], dtype=np.float64)
    np.add.at(data, segments, x.data)

    def backward_fn(g):
        _accumulate(x, g[segments])

    return _make(tape, "segment_sum", data, (x,), backward_fn)


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

def softmax_xent(tape: Tape, logits: Tensor, labels: np.ndarray) -> Tensor:
    """Softmax cross-entropy, *summed* over the batch.

    ``labels`` are integer class ids, shape [n].  A batch of n graphs with
    uniform logits therefore yields loss n*ln(num_classes).
    """
    labels = np.asarray(labels)
    n, c = logits.data.shape
    if labels.shape != (n,):
        raise ValueError("labels must supply one class id per row")
    if labels.size and not (0 <= labels.min() and labels.max() < c):
        raise ValueError("label out of range")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - logsumexp
    loss = -log_probs[np.arange(n), labels].sum()

    def backward_fn(g):
        grad = np.exp(log_probs)
        grad[np.arange(n), labels] -= 1.0
        _accumulate(logits, g * grad)

    return _make(tape, "softmax_xent", np.asarray(loss), (logits,), backward_fn)


# ---------------------------------------------------------------------------
# interval meet ops
# ---------------------------------------------------------------------------

def _pair_meet_masks(a: np.ndarray, b: np.ndarray, variant: Aggregator):
    """Forward values and gradient routing masks for an elementwise binary
    meet of interval arrays shaped [..., 2].  Ties route to ``a``.

    Returns (lo, hi, lo_from_a, hi_from_a, hi_mode) where hi_mode is 0 for an
    ordinary hi (min of his), 1 for "both endpoints copy the chosen hi"
    (the non-overlap collapse), and 2 for "hi is the constant 1".
    """
    a_lo, a_hi = a[..., 0], a[..., 1]
    b_lo, b_hi = b[..., 0], b[..., 1]
    max_lo = np.maximum(a_lo, b_lo)
    min_hi = np.minimum(a_hi, b_hi)
    lo_from_a_max = a_lo >= b_lo
    hi_from_a_min = a_hi <= b_hi

    if variant is Aggregator.AGR_0:
        lo = np.minimum(a_lo, b_lo)
        hi = min_hi
        return lo, hi, a_lo <= b_lo, hi_from_a_min, np.zeros(lo.shape, dtype=np.int8)

    overlap = max_lo <= min_hi
    if variant is Aggregator.AGR_E:
        lo = np.where(overlap, max_lo, min_hi)
        hi = min_hi
        # non-overlap: both endpoints come from the smaller hi
        lo_from_a = np.where(overlap, lo_from_a_max, hi_from_a_min)
        hi_mode = np.where(overlap, np.int8(0), np.int8(1))
        return lo, hi, lo_from_a, hi_from_a_min, hi_mode

    if variant is Aggregator.AGR_NEW:
        ordinary = overlap & (np.maximum(a_hi, b_hi) < 1.0 - ONE_TOL)
        lo = max_lo
        hi = np.where(ordinary, min_hi, 1.0)
        hi_mode = np.where(ordinary, np.int8(0), np.int8(2))
        return lo, hi, lo_from_a_max, hi_from_a_min, hi_mode

    raise ValueError(f"unknown aggregator {variant!r}")


def interval_meet_pair(tape: Tape, a: Tensor, b: Tensor, variant: Aggregator) -> Tensor:
    """Elementwise binary meet of two interval tensors shaped [..., 2].

    Gradient ties route to the first operand.  In the non-overlap collapse of
    the overlap-aware meet, both output endpoints are the smaller hi, so that
    source receives both endpoint gradients; the widened hi of the
    order-theoretic meet is the constant 1 and passes no gradient.
    """
    if a.data.shape != b.data.shape or a.data.shape[-1] != 2:
        raise ValueError("interval tensors must share a shape [..., 2]")
    lo, hi, lo_from_a, hi_from_a, hi_mode = _pair_meet_masks(a.data, b.data, variant)

    # lo gradient source channel: the collapsed branch copies a *hi* endpoint
    lo_chan = np.where(hi_mode == 1, 1, 0)

    def backward_fn(g):
        g_lo, g_hi = g[..., 0], g[..., 1]
        ga, gb = _grad_buffer(a), _grad_buffer(b)
        for src_is_a, buf in ((True, ga), (False, gb)):
            pick_lo = lo_from_a if src_is_a else ~lo_from_a
            buf[..., 0] += g_lo * (pick_lo & (lo_chan == 0))
            buf[..., 1] += g_lo * (pick_lo & (lo_chan == 1))
            pick_hi = (hi_from_a if src_is_a else ~hi_from_a) & (hi_mode != 2)
            buf[..., 1] += g_hi * pick_hi

    data = np.empty(lo.shape + (2,))
    data[..., 0] = lo
    data[..., 1] = hi
    return _make(tape, f"meet_pair[{variant.value}]", data, (a, b), backward_fn)


def _first_attaining(values: np.ndarray, target: np.ndarray, tiebreak: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Slot (axis-1 index) of the masked element equal to ``target`` with the
    smallest tiebreak value, then the smallest slot.  Shapes: values/tiebreak
    [n, k, d], target [n, d]; returns int slots [n, d]."""
    attains = mask & (values == target[:, None, :])
    # argmin returns the first index attaining the minimum, so a single pass
    # implements "smallest tiebreak, then smallest slot" over attaining slots
    # (tiebreaks are endpoints in [0, 1], so inf marks non-attaining slots).
    return np.where(attains, tiebreak, np.inf).argmin(axis=1)


def interval_meet_aggregate(
    tape: Tape,
    h: Tensor,
    nbr_idx: np.ndarray,
    nbr_mask: np.ndarray,
    variant: Aggregator,
) -> Tensor:
    """Per-row meet-aggregation of gathered interval states.

    ``h`` holds node states [n, d, 2]; ``nbr_idx``/``nbr_mask`` are padded
    [m, k] neighbor tables (mask True marks real entries; every row needs at
    least one).  Row i of the result is the meet-fold of the states indexed
    by its unmasked entries, evaluated in closed form:

    * min-pair fold:        [min lo, min hi]
    * overlap-aware fold:   [max lo, min hi] while some point is shared,
                            otherwise the degenerate [min hi, min hi]
    * order-theoretic fold: [max lo, min hi] while shared and every hi stays
                            below 1, otherwise [max lo, 1]

    A single unmasked entry is returned unchanged (the fold over one element
    is the identity, regardless of its hi).  These match the sorted
    left-fold of the scalar aggregators exactly; the backward pass scatters
    each output endpoint's gradient to the canonically first attaining input
    (ties ranked by (lo, hi, slot)), with the constant-1 widened hi passing
    no gradient.
    """
    nbr_idx = np.asarray(nbr_idx)
    nbr_mask = np.asarray(nbr_mask, dtype=bool)
    if nbr_idx.shape != nbr_mask.shape or nbr_idx.ndim != 2:
        raise ValueError("nbr_idx and nbr_mask must be matching 2-d tables")
    counts = nbr_mask.sum(axis=1)
    if (counts == 0).any():
        raise EmptyAggregationError("aggregation over an empty neighbor row")
    n_nodes, d = h.data.shape[0], h.data.shape[1]
    if nbr_idx.size and not (0 <= nbr_idx.min() and nbr_idx.max() < n_nodes):
        raise ValueError("neighbor index out of range")
    if variant not in (Aggregator.AGR_0, Aggregator.AGR_E, Aggregator.AGR_NEW):
        raise ValueError(f"unknown aggregator {variant!r}")

    gathered = h.data[nbr_idx]  # [m, k, d, 2]
    lo = gathered[..., 0]
    hi = gathered[..., 1]
    mask3 = nbr_mask[:, :, None]

    hi_min = np.min(hi, axis=1, where=mask3, initial=np.inf)
    if variant is Aggregator.AGR_0:
        out_lo = np.min(lo, axis=1, where=mask3, initial=np.inf)
        out_hi = hi_min
        overlap = ordinary = None
    else:
        lo_max = np.max(lo, axis=1, where=mask3, initial=-np.inf)
        if variant is Aggregator.AGR_E:
            overlap = lo_max <= hi_min
            out_lo = np.where(overlap, lo_max, hi_min)
            out_hi = hi_min
            ordinary = None
        else:
            hi_max = np.max(hi, axis=1, where=mask3, initial=-np.inf)
            ordinary = (lo_max <= hi_min) & (hi_max < 1.0 - ONE_TOL)
            out_lo = lo_max
            out_hi = np.where(ordinary, hi_min, 1.0)
            overlap = None

    # a fold over one element is the identity: bypass the closed form
    single = counts == 1
    any_single = bool(single.any())
    if any_single:
        s0 = nbr_mask.argmax(axis=1)
        rows = np.nonzero(single)[0]
        out_lo[rows] = lo[rows, s0[rows], :]
        out_hi[rows] = hi[rows, s0[rows], :]

    def backward_fn(g):
        # Routing tables are only needed here, so forward-only evaluation
        # passes never pay for the slot selection.  On rows where out_lo was
        # copied from a hi endpoint (the collapsed branch) or overridden by
        # the singleton bypass, the lo-targeted selection below is discarded
        # in favor of the correct table, so its garbage slots are harmless.
        hi_const = np.zeros(out_hi.shape, dtype=bool)
        chan_for_lo: np.ndarray = np.zeros((1, 1), dtype=np.int8)
        slot_for_lo = _first_attaining(lo, out_lo, hi, mask3)
        if variant is Aggregator.AGR_0:
            slot_hi = _first_attaining(hi, out_hi, lo, mask3)
        elif variant is Aggregator.AGR_E:
            slot_hi = _first_attaining(hi, out_hi, lo, mask3)
            slot_for_lo = np.where(overlap, slot_for_lo, slot_hi)
            chan_for_lo = np.where(overlap, np.int8(0), np.int8(1))
        else:
            # the widened rows' hi is the constant 1 (blocked below), so the
            # selection can target the pristine hi_min everywhere
            slot_hi = _first_attaining(hi, hi_min, lo, mask3)
            hi_const = ~ordinary
        if any_single:
            slot_for_lo = np.where(single[:, None], s0[:, None], slot_for_lo)
            slot_hi = np.where(single[:, None], s0[:, None], slot_hi)
            chan_for_lo = np.where(single[:, None], np.int8(0), chan_for_lo)
            hi_const = hi_const & ~single[:, None]

        src_lo = np.take_along_axis(nbr_idx, slot_for_lo, axis=1)  # [m, d]
        src_hi = np.take_along_axis(nbr_idx, slot_hi, axis=1)
        chan_lo = np.broadcast_to(chan_for_lo.astype(np.int64), src_lo.shape)
        dims = np.arange(d, dtype=np.int64)[None, :]

        # scatter-add via one bincount over linearized (node, dim, channel)
        # indices; the blocked widened-hi entries are dropped
        buf = _grad_buffer(h)
        keep = ~hi_const
        lin_lo = (src_lo * d + dims) * 2 + chan_lo
        lin_hi = (src_hi[keep] * d + np.broadcast_to(dims, src_hi.shape)[keep]) * 2 + 1
        lin = np.concatenate([lin_lo.ravel(), lin_hi])
        weights = np.concatenate([g[..., 0].ravel(), g[..., 1][keep]])
        buf += np.bincount(lin, weights=weights, minlength=buf.size).reshape(buf.shape)

    data = np.empty(out_lo.shape + (2,))
    data[..., 0] = out_lo
    data[..., 1] = out_hi
    return _make(tape, f"meet_agg[{variant.value}]", data, (h,), backward_fn)


# ---------------------------------------------------------------------------
# optimization
# ---------------------------------------------------------------------------

class Adam:
    """Adam with bias correction (decay rates 0.9/0.999, epsilon 1e-8)."""

    def __init__(self, params: list[Tensor], lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1**self.t
        b2t = 1.0 - self.beta2**self.t
        for p, m, v in zip(self.params, self._m, self._v):
            if p.grad is None:
                continue
            g = p.grad
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p.data -= self.lr * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


def lr_schedule(base_lr: float, epoch: int) -> float:
    """Step decay: the learning rate halves every 50 epochs."""
    return base_lr * 0.5 ** (epoch // 50)


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    """Unreadable or incompatible checkpoint file."""


def save_checkpoint(path, arrays: dict[str, np.ndarray]) -> Path:
    """Write named arrays to a versioned .npz file; returns the path written
    (a .npz suffix is appended when missing, mirroring ``np.savez``)."""
    if any(k.startswith("__") for k in arrays):
        raise ValueError("array names must not start with '__'")
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_name(path.name + ".npz")
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, __version__=np.int64(CHECKPOINT_VERSION), **arrays)
    return path


def load_checkpoint(path) -> dict[str, np.ndarray]:
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as bundle:
            if "__version__" not in bundle:
                raise CheckpointError(f"{path.name}: not a checkpoint (missing version)")
            version = int(bundle["__version__"])
            if version != CHECKPOINT_VERSION:
                raise CheckpointError(
                    f"{path.name}: checkpoint version {version} unsupported (expected {CHECKPOINT_VERSION})"
                )
            return {k: bundle[k] for k in bundle.files if k != "__version__"}
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"{path.name}: unreadable checkpoint ({exc})") from exc
