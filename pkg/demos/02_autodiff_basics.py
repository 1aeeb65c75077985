#!/usr/bin/env python3
"""The reverse-mode tape in five minutes.

Every differentiable operation takes the tape as its first argument,
computes its value eagerly with numpy, and registers a closure that routes
the output gradient back to its parents.  ``tape.backward(loss)`` replays
those closures in reverse order.

The interval meet operators are the interesting case: their outputs select
endpoints from their inputs (like max-pooling selects pixels), so their
"gradient" is a routing decision.  The finite-difference check at the end
confirms the routing matches the numerical derivative.

Run:  python3 demos/02_autodiff_basics.py
"""

import numpy as np

from ivgnn import autodiff as ad
from ivgnn.autodiff import Tape, Tensor
from ivgnn.intervals import Aggregator

print("=" * 72)
print("1. A scalar chain: loss = sum(sigmoid(x @ w + b))")
print("=" * 72)
rng = np.random.default_rng(7)
x = Tensor(rng.normal(size=(4, 3)))
w = Tensor(rng.normal(size=(3, 2)))
b = Tensor(np.zeros(2))

tape = Tape()
hidden = ad.sigmoid(tape, ad.linear(tape, x, w, b))
loss = ad.sum_all(tape, hidden)
tape.backward(loss)
print(f"loss = {float(loss.data):.6f}")
print(f"dloss/dw =\n{w.grad}\n")

print("=" * 72)
print("2. Gradients of an interval meet are routing decisions")
print("=" * 72)
# two interval states per node; the disjoint pair exercises the widening
# branch whose hi is the constant 1 (no gradient flows to it)
a = Tensor(np.array([[[0.10, 0.20]], [[0.10, 0.20]]]))
c = Tensor(np.array([[[0.15, 0.30]], [[0.30, 0.40]]]))
tape = Tape()
met = ad.interval_meet_pair(tape, a, c, Aggregator.AGR_NEW)
tape.backward(ad.sum_all(tape, met))
print(f"meet values:\n{met.data}")
print(f"gradient into the first operand (row 1 overlaps, row 2 is disjoint):\n{a.grad}")
print(f"gradient into the second operand:\n{c.grad}\n")

print("=" * 72)
print("3. Checking an aggregation against central finite differences")
print("=" * 72)
h = Tensor(
    np.sort(rng.uniform(0.05, 0.95, size=(5, 2, 2)), axis=-1)
)  # 5 nodes, 2 interval dims
nbr_idx = np.array([[1, 2], [0, 3], [0, 4], [1, 0], [2, 0]])
nbr_mask = np.ones((5, 2), dtype=bool)


def forward():
    tape = Tape()
    out = ad.interval_meet_aggregate(tape, h, nbr_idx, nbr_mask, Aggregator.AGR_NEW)
    return tape, ad.sum_all(tape, out)


tape, loss = forward()
tape.backward(loss)
analytic = h.grad.copy()

eps = 1e-6
numeric = np.zeros_like(h.data)
for idx in np.ndindex(h.data.shape):
    orig = h.data[idx]
    h.data[idx] = orig + eps
    up = float(forward()[1].data)
    h.data[idx] = orig - eps
    down = float(forward()[1].data)
    h.data[idx] = orig
    numeric[idx] = (up - down) / (2 * eps)

worst = np.abs(analytic - numeric).max()
print(f"worst |analytic - numeric| over {h.data.size} coordinates: {worst:.2e}")
assert worst < 1e-6
print("finite differences agree with the tape.")
