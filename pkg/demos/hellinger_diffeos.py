"""
Distances between warps
=======================

Piecewise-linear diffeomorphisms of [0, 1] compared through the Hellinger
affinity of their derivatives.
"""

import numpy as np

from etwarp import (
    PiecewiseLinearDiffeo,
    compose,
    hellinger_affinity,
    hellinger_distance,
    invert,
    sine_distance,
    theta_distance,
)
from etwarp.hellinger import random_diffeo

ident = PiecewiseLinearDiffeo.identity()
a = PiecewiseLinearDiffeo([0, 0.5, 1], [0, 0.25, 1])

# for this warp the affinity is cos(pi / 12)
print("C     ", hellinger_affinity(a, ident), np.cos(np.pi / 12))
print("theta ", theta_distance(a, ident))
print("S     ", sine_distance(a, ident))
print("H     ", hellinger_distance(a, ident))

# reparametrising both arguments by the same warp changes nothing
rng = np.random.default_rng(0)
b, g = random_diffeo(rng), random_diffeo(rng)
print("C(a, b)        ", hellinger_affinity(a, b))
print("C(a g, b g)    ", hellinger_affinity(compose(a, g), compose(b, g)))
print("C(a b^-1, id)  ", hellinger_affinity(compose(a, invert(b)), ident))
