import numpy as np
import pytest

from cemethod import benchmarks as bm


def test_registry_shape():
    names = bm.list_benchmarks()
    assert len(names) == 24 and names[0] == "ackley" and "styblinski_tang" in names
    assert set(bm.EASY) | set(bm.HARD) == set(names)
    assert not set(bm.EASY) & set(bm.HARD)


@pytest.mark.parametrize("name, x, value", [
    ("booth", (1.0, 3.0), 0.0),
    ("himmelblau", (3.0, 2.0), 0.0),
    ("goldstein_price", (0.0, -1.0), 3.0),
    ("sphere", (3.0, 4.0), 25.0),
    ("rosenbrock", (1.0, 1.0), 0.0),
    ("easom", (np.pi, np.pi), -1.0),
    ("beale", (3.0, 0.5), 0.0),
    ("levi_n13", (1.0, 1.0), 0.0),
])
def test_closed_form_values(name, x, value):
    assert bm.eval_benchmark(name, x) == pytest.approx(value, abs=1e-12)


def test_known_optimum():
    assert bm.known_optimum("ackley") == (0.0, [(0.0, 0.0)])
    v, pts = bm.known_optimum("easom")
    assert v == -1.0 and np.allclose(pts[0], [np.pi, np.pi])
    v, pts = bm.known_optimum("eggholder")
    assert v == pytest.approx(-959.6407, abs=1e-4) and pts[0][0] == 512.0


def test_tolerances():
    for name in bm.EASY:
        assert bm.get(name).ref_tolerance == 1e-3
    assert bm.get("rastrigin").ref_tolerance == 1e-2
    assert bm.get("holder_table").ref_tolerance == pytest.approx(0.19208502567886743)


@pytest.mark.parametrize("name", bm.list_benchmarks())
def test_reference_points(name):
    b = bm.get(name)
    for p in b.ref_min_points:
        assert np.all(np.asarray(p) >= b.lower_bounds) and np.all(np.asarray(p) <= b.upper_bounds)
        assert abs(b(np.asarray(p)) - b.ref_min_value) <= min(b.ref_tolerance, 1e-6)


@pytest.mark.parametrize("name", bm.list_benchmarks())
def test_grid_finds_nothing_lower(name):
    b = bm.get(name)
    g1 = np.linspace(b.domain[0][0], b.domain[0][1], 201)
    g2 = np.linspace(b.domain[1][0], b.domain[1][1], 201)
    X1, X2 = np.meshgrid(g1, g2)
    vals = b(np.stack((X1.ravel(), X2.ravel()), axis=1))
    assert vals.shape == (201 * 201,)
    assert np.all(np.isfinite(vals))
    assert vals.min() >= b.ref_min_value - b.ref_tolerance


def test_vectorized_matches_pointwise():
    X = np.random.default_rng(1).uniform(-2, 2, (30, 2))
    for name in bm.list_benchmarks():
        batch = bm.eval_benchmark(name, X)
        assert np.allclose(batch, [bm.eval_benchmark(name, x) for x in X], rtol=1e-14, atol=0)


def test_errors():
    with pytest.raises(KeyError):
        bm.get("nope")
    with pytest.raises(ValueError):
        bm.eval_benchmark("sphere", [1.0, 2.0, 3.0])
