import math

import numpy as np
import pytest
from scipy.integrate import quad

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

ID = PiecewiseLinearDiffeo.identity()
A = PiecewiseLinearDiffeo([0, 0.5, 1], [0, 0.25, 1])

# closed form: 0.5 sqrt(0.5) + 0.5 sqrt(1.5) = (sqrt 2 + sqrt 6) / 4 = cos(pi / 12)
A_AFFINITY = 0.96592582628906829
A_THETA = 0.26179938779914941
A_SINE = 0.25881904510252076
A_HELL = 0.18459191128251453


def quad_affinity(a, b):
    knots = np.union1d(a.knots, b.knots)
    total = 0.0
    for lo, hi in zip(knots[:-1], knots[1:]):
        h = 1e-7 * (hi - lo)
        da = lambda t: (a(t + h) - a(t - h)) / (2 * h)
        db = lambda t: (b(t + h) - b(t - h)) / (2 * h)
        total += quad(lambda t: math.sqrt(da(t) * db(t)), lo + 2 * h, hi - 2 * h)[0]
    return total


class TestAffinity:
    def test_identity(self):
        assert hellinger_affinity(ID, ID) == 1.0

    def test_example(self):
        assert hellinger_affinity(A, ID) == pytest.approx(A_AFFINITY, abs=1e-15)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(3)
        assert quad_affinity(A, ID) == pytest.approx(A_AFFINITY, abs=1e-6)
        for _ in range(20):
            a, b = random_diffeo(rng), random_diffeo(rng)
            assert hellinger_affinity(a, b) == pytest.approx(quad_affinity(a, b), abs=1e-6)

    def test_strictly_below_one_when_different(self):
        rng = np.random.default_rng(4)
        grid = np.linspace(0, 1, 257)
        for _ in range(2000):
            a, b = random_diffeo(rng), random_diffeo(rng)
            if np.max(np.abs(a(grid) - b(grid))) >= 1e-6:
                assert 0.0 < hellinger_affinity(a, b) < 1.0

    def test_redundant_representation(self):
        b = PiecewiseLinearDiffeo([0, 0.25, 0.5, 1], [0, 0.125, 0.25, 1])
        assert b == A
        assert hellinger_affinity(A, b) == 1.0


class TestDistances:
    def test_identity_zero(self):
        for d in (theta_distance, sine_distance, hellinger_distance):
            assert d(ID, ID) == 0.0
            assert d(A, A) == 0.0

    def test_example_values(self):
        assert theta_distance(A, ID) == pytest.approx(A_THETA, abs=1e-12)
        assert sine_distance(A, ID) == pytest.approx(A_SINE, abs=1e-12)
        assert hellinger_distance(A, ID) == pytest.approx(A_HELL, abs=1e-12)

    def test_relations(self):
        rng = np.random.default_rng(5)
        for _ in range(500):
            a, b = random_diffeo(rng), random_diffeo(rng)
            th, s, h = theta_distance(a, b), sine_distance(a, b), hellinger_distance(a, b)
            assert th == theta_distance(b, a)
            assert s <= th
            assert h**2 == pytest.approx(2 * math.sin(th / 2) ** 2, abs=1e-12)
            assert th == pytest.approx(math.acos(hellinger_affinity(a, b)), abs=1e-7)
            assert 0 <= th < math.pi / 2

    def test_sine_subadditive(self):
        rng = np.random.default_rng(6)
        a, b = rng.uniform(0, math.pi / 2, (2, 10_000))
        assert np.all(np.sin(a + b) <= np.sin(a) + np.sin(b) + 1e-15)


class TestComposeInvert:
    def test_right_identity(self):
        assert compose(A, ID) == A

    def test_left_identity(self):
        assert compose(ID, A) == A

    def test_inverse_gives_identity(self):
        rng = np.random.default_rng(7)
        for a in [A] + [random_diffeo(rng) for _ in range(50)]:
            c = compose(a, invert(a))
            np.testing.assert_allclose(c.values, c.knots, atol=1e-12)

    def test_invert_example(self):
        inv = invert(A)
        np.testing.assert_array_equal(inv.breakpoints, [[0, 0], [0.25, 0.5], [1, 1]])
        assert invert(ID) == ID
        assert invert(inv) == A

    def test_compose_is_function_composition(self):
        rng = np.random.default_rng(8)
        x = rng.random(200)
        for _ in range(50):
            a, g = random_diffeo(rng), random_diffeo(rng)
            np.testing.assert_allclose(compose(a, g)(x), a(g(x)), atol=1e-12)

    def test_right_invariance(self):
        rng = np.random.default_rng(9)
        for _ in range(300):
            a, b, g = (random_diffeo(rng) for _ in range(3))
            assert abs(hellinger_affinity(compose(a, g), compose(b, g)) - hellinger_affinity(a, b)) <= 1e-10
