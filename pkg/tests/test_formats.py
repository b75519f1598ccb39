import json

import numpy as np
import pytest

from etwarp import PiecewiseLinearDiffeo, build_time_series, elastic_similarity
from etwarp.formats import (
    FormatError,
    parse_diffeo_csv,
    parse_similarity_csv,
    parse_time_series_csv,
    read_result_json,
    write_diffeo_csv,
    write_matrix_csv,
    write_result_json,
)
from instances import random_pair


class TestTimeSeriesCsv:
    def test_two_points(self):
        ts = parse_time_series_csv("t,v1\n0,1.5\n0.5,2.5")
        np.testing.assert_array_equal(ts.timestamps, [0, 0.5])
        np.testing.assert_array_equal(ts.values.ravel(), [1.5, 2.5])

    def test_vector_values(self):
        ts = parse_time_series_csv("t,v1,v2\n0,1,2\n0.25,3,4\n")
        assert ts.dim == 2

    def test_first_timestamp(self):
        with pytest.raises(FormatError, match="first timestamp") as exc:
            parse_time_series_csv("t,v1\n0.2,1.0")
        assert exc.value.line == 2

    def test_normalize(self):
        ts = parse_time_series_csv("t,v1\n0.2,1.0\n0.4,2.0", normalize=True)
        np.testing.assert_allclose(ts.timestamps, [0, 0.5])

    def test_inconsistent_dimension(self):
        with pytest.raises(FormatError, match="inconsistent dimension") as exc:
            parse_time_series_csv("t,v1,v2\n0,1,2\n0.5,3")
        assert exc.value.line == 3

    @pytest.mark.parametrize(
        "text, match",
        [
            ("", "empty"),
            ("0,1\n0.5,2", "header"),
            ("t,x\n0,1", "header"),
            ("t,v1\n0,abc", "malformed number"),
            ("t,v1\n0,1\n0.5,2\n0.5,3", "strictly increasing"),
            ("t,v1\n0,1\n1.0,2", "< 1"),
            ("t,v1\n", "no records"),
            ("t,v1\n0,nan", "non-finite"),
        ],
    )
    def test_rejects(self, text, match):
        with pytest.raises(FormatError, match=match):
            parse_time_series_csv(text)


class TestSimilarityCsv:
    def test_scalar(self):
        np.testing.assert_array_equal(parse_similarity_csv("1\n", 1, 1).entries, [[1.0]])

    def test_two_by_two(self):
        C = parse_similarity_csv("0.5,1\n1,0.5", 2, 2)
        np.testing.assert_array_equal(C.entries, [[0.5, 1], [1, 0.5]])

    def test_out_of_range(self):
        with pytest.raises(FormatError, match="outside"):
            parse_similarity_csv("1.2", 1, 1)
        with pytest.raises(FormatError, match="outside"):
            parse_similarity_csv("-0.1", 1, 1)

    def test_zero_floored(self):
        assert parse_similarity_csv("0", 1, 1).entries[0, 0] == 1e-15

    def test_shape(self):
        with pytest.raises(FormatError, match="columns") as exc:
            parse_similarity_csv("1,1\n1", 2, 2)
        assert exc.value.line == 2
        with pytest.raises(FormatError, match="rows"):
            parse_similarity_csv("1,1", 2, 2)


class TestDiffeoCsv:
    def test_identity(self):
        assert parse_diffeo_csv("tau,alpha\n0,0\n1,1") == PiecewiseLinearDiffeo.identity()

    def test_example(self):
        d = parse_diffeo_csv("tau,alpha\n0,0\n0.5,0.25\n1,1")
        np.testing.assert_array_equal(d.breakpoints, [[0, 0], [0.5, 0.25], [1, 1]])

    def test_non_monotone(self):
        with pytest.raises(FormatError, match="non-monotone") as exc:
            parse_diffeo_csv("tau,alpha\n0,0\n0.5,0.5\n0.4,0.7\n1,1")
        assert exc.value.line == 4

    @pytest.mark.parametrize(
        "text", ["tau,alpha\n0.1,0\n1,1", "tau,alpha\n0,0\n0.5,0.5", "alpha,tau\n0,0\n1,1", ""]
    )
    def test_endpoints_and_header(self, text):
        with pytest.raises(FormatError):
            parse_diffeo_csv(text)

    def test_round_trip(self):
        d = PiecewiseLinearDiffeo([0, 0.1, 0.7, 1], [0, 1 / 3, 0.6, 1])
        assert parse_diffeo_csv(write_diffeo_csv(d)) == d


class TestResultJson:
    def test_singleton(self):
        f = build_time_series([0], [0.0])
        doc = json.loads(write_result_json(elastic_similarity(f, f, [[0.5]]), {"kernel": "matrix"}))
        assert set(doc) == {"similarity", "path", "alpha", "metadata"}
        assert doc["similarity"] == 0.5
        assert doc["path"] == [{"branch": "F", "count": 1, "end_i": 1, "end_j": 1}]
        assert doc["alpha"] == [[0, 0], [1, 1]]
        assert doc["metadata"]["kernel"] == "matrix"
        assert "version" in doc["metadata"]

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            f, g, C = random_pair(rng, 9)
            r = elastic_similarity(f, g, C)
            doc = read_result_json(write_result_json(r, {"inputs": ["a", "b"]}))
            assert doc.similarity == r.value
            assert doc.warping_path == r.path
            assert doc.warp == r.alpha
            assert write_result_json(doc) == write_result_json(r, {"inputs": ["a", "b"]})

    def test_deterministic_and_17_digits(self):
        f = build_time_series([0, 0.3], [0.0, 1.0])
        g = build_time_series([0], [0.5])
        r = elastic_similarity(f, g, [[0.7], [0.9]])
        text = write_result_json(r)
        assert text == write_result_json(r)
        assert f'"similarity": {r.value:.17g}' in text
        keys = [ln.split('"')[1] for ln in text.splitlines() if ln.startswith('  "')]
        assert keys == sorted(keys)

    def test_rejects_malformed(self):
        with pytest.raises(FormatError):
            read_result_json("{")
        with pytest.raises(FormatError, match="missing"):
            read_result_json('{"similarity": 1}')


def test_matrix_csv():
    assert write_matrix_csv([[1.0, 0.25], [0.25, 1.0]]) == "1.0,0.25\n0.25,1.0\n"
