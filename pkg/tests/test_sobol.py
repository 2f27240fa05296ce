import numpy as np
import pytest

from rveuq.pce import evaluate, fit_lar
from rveuq.sampling import lhs
from rveuq.sobol import sobol_from_pce, write_sobol_csv


def fit(y_fn, bounds, n=60, p=3, seed=0):
    doe = lhs(n, bounds, seed=seed)
    return fit_lar(doe.samples, y_fn(doe.samples), p, bounds), doe


def test_single_input_takes_everything():
    bounds = [(-1.0, 1.0)] * 3
    model, _ = fit(lambda X: 2.0 * X[:, 0], bounds)
    s = sobol_from_pce(model)
    assert s.first_order[0] == pytest.approx(1.0, abs=1e-10)
    assert s.total[0] == pytest.approx(1.0, abs=1e-10)
    assert np.abs(s.first_order[1:]).max() <= 1e-10
    assert np.abs(s.total[1:]).max() <= 1e-10


def test_additive_equal_inputs_split_evenly():
    bounds = [(-1.0, 1.0)] * 2
    model, _ = fit(lambda X: X[:, 0] + X[:, 1], bounds)
    s = sobol_from_pce(model)
    assert np.allclose(s.first_order, 0.5, atol=1e-8)
    assert np.allclose(s.total, s.first_order, atol=1e-10)
    assert s.first_order.sum() == pytest.approx(1.0, abs=1e-8)


def test_index_ordering_invariants():
    bounds = [(-1.0, 1.0)] * 3
    model, _ = fit(lambda X: X[:, 0] ** 2 + X[:, 0] * X[:, 1] + 0.2 * X[:, 2],
                   bounds, n=80, p=4)
    s = sobol_from_pce(model)
    assert np.all(s.first_order >= -1e-10)
    assert np.all(s.total <= 1.0 + 1e-10)
    assert np.all(s.total - s.first_order >= -1e-10)
    assert s.first_order.sum() <= 1.0 + 1e-10


def test_scale_invariance():
    bounds = [(-1.0, 1.0)] * 2
    doe = lhs(60, bounds, seed=3)
    y = doe.samples[:, 0] ** 3 + 0.5 * doe.samples[:, 1]
    a = sobol_from_pce(fit_lar(doe.samples, y, 4, bounds))
    b = sobol_from_pce(fit_lar(doe.samples, 250.0 * y, 4, bounds))
    assert np.abs(a.first_order - b.first_order).max() <= 1e-12
    assert np.abs(a.total - b.total).max() <= 1e-12


def test_zero_variance_model_rejected():
    bounds = [(0.0, 1.0)] * 2
    doe = lhs(10, bounds, seed=4)
    model = fit_lar(doe.samples, np.full(10, 3.0), 3, bounds)
    with pytest.raises(ValueError, match="zero-variance"):
        sobol_from_pce(model)


def test_indices_match_double_loop_monte_carlo():
    # d = 2, p = 3 model checked against the Saltelli pick-freeze estimator
    bounds = [(-1.0, 1.0)] * 2

    def f(X):
        return X[:, 0] + 0.8 * X[:, 1] ** 2 + 0.5 * X[:, 0] * X[:, 1]

    model, _ = fit(f, bounds, n=80, p=3, seed=5)
    s = sobol_from_pce(model)

    rng = np.random.default_rng(6)
    n = 10 ** 6
    A = rng.uniform(-1, 1, size=(n, 2))
    B = rng.uniform(-1, 1, size=(n, 2))
    yA = evaluate(model, A)
    yB = evaluate(model, B)
    var = np.var(np.concatenate([yA, yB]), ddof=1)
    for i in range(2):
        ABi = A.copy()
        ABi[:, i] = B[:, i]
        yABi = evaluate(model, ABi)
        first = np.mean(yB * (yABi - yA)) / var
        total = 0.5 * np.mean((yA - yABi) ** 2) / var
        se = 3.0 / np.sqrt(n)
        assert abs(s.first_order[i] - first) <= se
        assert abs(s.total[i] - total) <= se


def test_csv_format(tmp_path):
    bounds = [(-1.0, 1.0)] * 2
    model, _ = fit(lambda X: X[:, 0] + X[:, 1] ** 2, bounds)
    s = sobol_from_pce(model, names=("alpha", "beta"))
    path = tmp_path / "sobol.csv"
    write_sobol_csv(s, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "parameter,S,ST"
    assert lines[1].startswith("alpha,")
    assert len(lines) == 3
    values = [float(v) for v in lines[1].split(",")[1:]]
    assert values[0] == pytest.approx(s.first_order[0])
