"""
Running time
============

The table fill costs O(nm(n + m)): doubling both lengths multiplies the
time by about eight.
"""

from etwarp.cli import run_bench

sizes = [100, 200, 400]
times, exponent = run_bench(sizes, seed=0)
for n, t in zip(sizes, times):
    print(f"n = m = {n:4d}  {t * 1e3:8.2f} ms")
print("fitted exponent", round(exponent, 2))
