"""
Checking the recurrence against enumeration
===========================================

For short series every interlacing pattern can be listed. The best pattern
found by brute force agrees with the dynamic programme.
"""

import numpy as np

from etwarp import TimeSeries, brute_force_similarity, elastic_similarity, enumerate_patterns

rng = np.random.default_rng(42)

for n, m in [(2, 2), (3, 4), (5, 5)]:
    print(f"{n}x{m}: {sum(1 for _ in enumerate_patterns(n, m))} patterns")

n, m = 4, 5
f = TimeSeries(np.sort(np.r_[0.0, rng.uniform(0, 1, n - 1)]), np.zeros(n))
g = TimeSeries(np.sort(np.r_[0.0, rng.uniform(0, 1, m - 1)]), np.zeros(m))
C = rng.uniform(0.05, 1.0, (n, m))

dp = elastic_similarity(f, g, C)
brute, path = brute_force_similarity(f, g, C)
print("dp    ", dp.value, dp.path)
print("brute ", brute, path)
