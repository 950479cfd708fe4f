import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rsfrm.dataio import (
    Dataset,
    fit_normalizer,
    generate_synthetic,
    kfold_split,
    load_keel,
    read_synthetic_csv,
    save_keel,
    synthetic_function,
    write_synthetic_csv,
)
from rsfrm.exceptions import NonNumericAttribute, ParseError, TooFewPatterns


def _surface_mp(x1, x2):
    x1, x2 = mpmath.mpf(x1), mpmath.mpf(x2)
    return 1.9 * (mpmath.mpf("1.35") + mpmath.exp(x1 + x2) * mpmath.sin(13 * (x2 - mpmath.mpf("0.6")) ** 2)
                  * mpmath.sin(7 * x1))


def test_synthetic_surface_values():
    assert synthetic_function(0.0, 0.0) == pytest.approx(2.565, abs=1e-12)
    assert synthetic_function(0.37, 0.6) == pytest.approx(2.565, abs=1e-12)
    assert float(synthetic_function(1.0, 1.0)) == pytest.approx(float(_surface_mp(1, 1)), rel=1e-14)
    # 10.6184..., within rounding of the commonly quoted 10.620
    assert abs(float(synthetic_function(1.0, 1.0)) - 10.620) < 0.002


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_synthetic_matches_high_precision(x1, x2):
    ref = float(_surface_mp(x1, x2))
    assert abs(float(synthetic_function(x1, x2)) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_generate_synthetic_seeded(tmp_path):
    a = generate_synthetic(500, seed=3)
    b = generate_synthetic(500, seed=3)
    assert a.inputs.shape == (500, 2)
    assert a.inputs.tobytes() == b.inputs.tobytes()
    assert np.all((a.inputs >= 0) & (a.inputs <= 1))
    path = tmp_path / "s.csv"
    write_synthetic_csv(a, path)
    back = read_synthetic_csv(path)
    assert back.inputs.tobytes() == a.inputs.tobytes()
    assert back.targets.tobytes() == a.targets.tobytes()


KEEL_SMALL = """@relation tiny
@attribute x real [0.0, 1.0]
@attribute y real [1.0, 3.0]
@inputs x
@outputs y
@data
0.0,1.0
1.0,3.0
"""


def test_keel_small(tmp_path):
    p = tmp_path / "tiny.dat"
    p.write_text(KEEL_SMALL)
    ds = load_keel(p)
    assert (ds.n_patterns, ds.n_inputs) == (2, 1)
    np.testing.assert_array_equal(ds.targets, [1.0, 3.0])
    assert ds.name == "tiny"


def test_keel_case_and_comments(tmp_path):
    p = tmp_path / "c.dat"
    p.write_text("% comment\n@RELATION c\n@Attribute a INTEGER [0,9]\n@attribute b REAL\n"
                 "@attribute out real\n@DATA\n1, 2.5, 3\n% inner comment\n4,5,6\n")
    ds = load_keel(p)
    np.testing.assert_array_equal(ds.inputs, [[1, 2.5], [4, 5]])
    np.testing.assert_array_equal(ds.targets, [3, 6])


def test_keel_output_not_last(tmp_path):
    p = tmp_path / "o.dat"
    p.write_text("@relation o\n@attribute t real\n@attribute a real\n@attribute b real\n"
                 "@inputs b, a\n@outputs t\n@data\n1,2,3\n")
    ds = load_keel(p)
    np.testing.assert_array_equal(ds.inputs, [[3, 2]])
    np.testing.assert_array_equal(ds.targets, [1])


@pytest.mark.parametrize(
    "row, line",
    [("0.5", 9), ("0.5,?", 9), ("0.5,abc", 9), ("0.5,1.0,2.0", 9)],
)
def test_keel_bad_rows_name_the_line(tmp_path, row, line):
    p = tmp_path / "bad.dat"
    p.write_text(KEEL_SMALL + row + "\n")
    with pytest.raises(ParseError) as err:
        load_keel(p)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_keel_nominal_rejected(tmp_path):
    p = tmp_path / "n.dat"
    p.write_text("@relation n\n@attribute a {red, blue}\n@attribute y real\n@data\nred,1\n")
    with pytest.raises(NonNumericAttribute) as err:
        load_keel(p)
    assert err.value.line == 2


def test_keel_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset("rt", rng.standard_normal((25, 4)) * 1e3, rng.standard_normal(25))
    p = tmp_path / "rt.dat"
    save_keel(ds, p)
    back = load_keel(p)
    assert back.inputs.tobytes() == ds.inputs.tobytes()
    assert back.targets.tobytes() == ds.targets.tobytes()


def test_normalizer_examples():
    norm = fit_normalizer([[2.0], [4.0]])
    np.testing.assert_array_equal(norm.apply([[2.0], [4.0]]), [[0.0], [1.0]])
    assert norm.apply([[5.0]])[0, 0] == 1.5
    const = fit_normalizer([[7.0], [7.0], [7.0]])
    np.testing.assert_array_equal(const.apply([[7.0], [7.0], [7.0]]), [[0.5]] * 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 30), st.integers(1, 5), st.integers(0, 2**31))
def test_normalizer_maps_training_range(N, n, seed):
    X = np.random.default_rng(seed).standard_normal((N, n)) * 50
    norm = fit_normalizer(X, (-1.0, 1.0))
    Z = norm.apply(X)
    assert np.all(Z >= -1 - 1e-12) and np.all(Z <= 1 + 1e-12)
    np.testing.assert_allclose(norm.invert(Z), X, rtol=1e-12, atol=1e-12)


def test_kfold_examples():
    assert sorted(kfold_split(10, 5, 0).sizes()) == [2] * 5
    assert sorted(kfold_split(11, 5, 0).sizes()) == [2, 2, 2, 2, 3]
    a, b = kfold_split(37, 5, 9), kfold_split(37, 5, 9)
    assert np.array_equal(a.assignments, b.assignments)
    with pytest.raises(TooFewPatterns):
        kfold_split(3, 5, 0)
    with pytest.raises(ValueError):
        kfold_split(10, 1, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 10), st.integers(0, 200), st.integers(0, 2**63 - 1))
def test_kfold_partition(k, extra, seed):
    N = k + extra
    plan = kfold_split(N, k, seed)
    sizes = plan.sizes()
    assert sizes.sum() == N and sizes.max() - sizes.min() <= 1
    seen = np.concatenate([plan.test_index(f) for f in range(k)])
    assert np.array_equal(np.sort(seen), np.arange(N))
    for train, test in plan.splits():
        assert not set(train) & set(test)
        assert len(train) + len(test) == N


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset("x", np.ones((3, 2)), np.ones(2))
    with pytest.raises(ValueError):
        Dataset("x", np.array([[math.nan]]), np.ones(1))


def test_mpg_file_shape():
    path = Path(__file__).parent / "data" / "mpg.dat"
    if not path.exists():
        pytest.skip("bundled MPG file missing")
    ds = load_keel(path)
    assert (ds.n_patterns, ds.n_inputs) == (392, 7)
