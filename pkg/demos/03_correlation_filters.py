"""Correlation filters from the ground up: learn, score, shift, update.

Shows the closed-form ridge filter doing the three things the tracker needs:
peaking at the target center, moving its peak with the target, and blending
in new appearance online.
"""

import numpy as np

from saltrack import FeatureStack, correlate, gaussian_label, hann_window, learn_filter, update_filter
from saltrack.dcf import default_label_sigma

rng = np.random.default_rng(42)
size = 32

print("=== learn on one sample, score the same sample ===")
label = gaussian_label(size, size, default_label_sigma(size, size))
template = rng.standard_normal((3, size, size))
stack = FeatureStack(template * hann_window(size, size)[None], 1)
filt = learn_filter(stack, label, lambda_reg=0.01, eta=0.02)
resp = correlate(filt, stack)
print("label center cell:", label.center)
print("response argmax :", resp.argmax_cell())

print()
print("=== the peak follows a circular shift of the query ===")
for shift in ((2, 1), (5, 0), (-3, 4)):
    rolled = FeatureStack(np.roll(np.roll(stack.data, shift[0], 1), shift[1], 2), 1)
    print(f"query shifted by {shift} -> peak at {correlate(filt, rolled).argmax_cell()}")

print()
print("=== online updates pull the filter toward new appearance ===")
new_appearance = FeatureStack(
    rng.standard_normal((3, size, size)) * hann_window(size, size)[None], 1
)
target = learn_filter(new_appearance, label, 0.01, eta=0.02)
current = filt
print("distance to the new-appearance filter after k updates (rate 0.02):")
for k in range(0, 121, 30):
    gap = np.abs(current.numerator - target.numerator).max()
    print(f"  k={k:3d}  max|num gap| = {gap:.5f}")
    for _ in range(30):
        current = update_filter(current, new_appearance, label)
print("the gap decays geometrically with ratio (1 - eta)")
