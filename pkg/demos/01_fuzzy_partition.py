"""Fuzzy partition of the two-variable benchmark surface.

Each cluster becomes one rule; its membership grades are the rule's
matching degrees, so every column of U sums to one.
"""

import numpy as np

from rsfrm import FcmConfig, fit_fcm, generate_synthetic

data = generate_synthetic(500, seed=0)
part = fit_fcm(data.inputs, FcmConfig(clusters=6, seed=1), record_history=True)

print("iterations:", part.iterations_run)
print("loss first/last: %.4f / %.4f" % (part.loss_history[0], part.final_loss))
print("prototypes:")
print(np.round(part.prototypes, 3))

# how crisp is the partition?  1.0 would be a hard clustering
top = part.memberships.max(axis=0)
print("mean top membership: %.3f" % top.mean())
print("column sums in [%.15f, %.15f]" % (part.memberships.sum(0).min(), part.memberships.sum(0).max()))

# points per cluster when each is assigned to its strongest rule
print("hard counts:", np.bincount(part.memberships.argmax(axis=0), minlength=6))
