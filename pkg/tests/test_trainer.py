import numpy as np
import pytest

from relu2.core import Dataset, ReluNetwork, Tolerances, eval_loss, pad_dimensions
from relu2.trainer import (EnumerationCapExceeded, SignPattern, TrainOptions, arrangement_cells,
                           collapse_samples, train_exact)
from relu2.trainer.exact import threads_from_env


def pair_data(bounded=False):
    return Dataset([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0], bounded=bounded)


def test_pair_single_unit():
    res = train_exact(pair_data(), 1)
    assert res.loss == pytest.approx(0.5, abs=1e-9)
    # both +e1 and -e1 are optimal; the lexicographic rule picks the first pattern
    w = res.network.unit_weights[0]
    assert abs(abs(w[0]) - 1.0) < 1e-9 and abs(w[1]) < 1e-9
    assert res.coeff_vector == (1,)


def test_pair_two_units_free_coefficients():
    res = train_exact(pair_data(), 2)
    assert res.loss == pytest.approx(0.0, abs=1e-12)
    assert res.coeff_vector == (1, 1)


def test_pair_two_units_mixed_coefficients():
    res = train_exact(pair_data(), 2, TrainOptions(fixed_coeffs=(1, -1)))
    assert res.loss == pytest.approx(0.5, abs=1e-9)


def test_pair_bounded():
    res = train_exact(pair_data(bounded=True), 2, TrainOptions(bounded=True))
    assert res.loss == pytest.approx(0.0, abs=1e-12)
    assert res.network.is_bounded()


def test_bounded_caps_the_weights():
    data = Dataset([[0.5, 0.0]], [2.0], bounded=True)
    free = train_exact(data, 1)
    ball = train_exact(data, 1, TrainOptions(bounded=True))
    assert free.loss == pytest.approx(0.0, abs=1e-12)
    # best bounded output is 0.5, error 1.5
    assert ball.loss == pytest.approx(2.25, rel=1e-9)
    assert ball.network.unit_norms()[0] <= 1 + 1e-12


def test_pattern_consistency_and_objective():
    rng = np.random.default_rng(4)
    data = Dataset(rng.standard_normal((4, 2)), rng.standard_normal(4))
    res = train_exact(data, 2)
    assert res.pattern.consistent_with(res.network, data.X, atol=1e-7)
    assert res.objective == pytest.approx(res.loss, abs=1e-6)


def test_duplicates_collapse():
    X = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]
    col = collapse_samples(Dataset(X, [1.0, 3.0, 2.0, 5.0], [1.0, 1.0, 2.0, 1.0]))
    assert col.X.shape == (2, 2)
    assert col.y.tolist() == [2.0, 2.0]
    assert col.w.tolist() == [2.0, 2.0]
    # spread 1 + 1 around the mean plus the zero row's 25
    assert col.offset == pytest.approx(27.0)


def test_duplicates_do_not_change_optimum():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((3, 2))
    y = rng.standard_normal(3)
    once = train_exact(Dataset(X, y, [2.0, 1.0, 1.0]), 1)
    twice = train_exact(Dataset(np.vstack([X, X[:1]]), np.append(y, y[0])), 1)
    assert once.loss == pytest.approx(twice.loss, abs=1e-12)
    assert twice.pattern.shape == (4, 1)


def test_arrangement_cells_count():
    # two independent lines through the origin in the plane cut four cells
    assert len(arrangement_cells(np.eye(2))) == 4
    # opposite vectors share one line
    assert arrangement_cells(np.array([[1.0, 0.0], [-1.0, 0.0]])) == [(0, 1), (1, 0)]


def test_cell_and_symmetry_pruning_keep_the_optimum():
    rng = np.random.default_rng(9)
    data = Dataset(rng.standard_normal((4, 2)), rng.standard_normal(4))
    ref = train_exact(data, 2, TrainOptions(cell_pruning=False, symmetry_pruning=False))
    for cp in (True, False):
        for sym in (True, False):
            res = train_exact(data, 2, TrainOptions(cell_pruning=cp, symmetry_pruning=sym))
            assert res.loss == pytest.approx(ref.loss, abs=1e-6)


def test_enumeration_cap():
    data = Dataset(np.eye(5), np.ones(5))
    with pytest.raises(EnumerationCapExceeded) as exc:
        train_exact(data, 2, TrainOptions(enum_cap=8))
    assert exc.value.required_bits == 10
    # three sorted coefficient classes for k = 2
    assert exc.value.subproblems == 3 * 2 ** 10


def test_all_zero_features():
    res = train_exact(Dataset([[0.0, 0.0], [0.0, 0.0]], [1.0, 3.0]), 1)
    assert res.loss == pytest.approx(5.0)
    assert res.subproblems == 0


def test_padding_keeps_optimum():
    data = Dataset([[0.3, -0.8]], [0.9])
    a = train_exact(data, 1)
    b = train_exact(pad_dimensions(data, 4), 1)
    assert a.loss == pytest.approx(b.loss, abs=1e-12)


def test_threads_give_identical_results():
    rng = np.random.default_rng(12)
    data = Dataset(rng.standard_normal((4, 3)), rng.standard_normal(4))
    one = train_exact(data, 2, TrainOptions(threads=1))
    two = train_exact(data, 2, TrainOptions(threads=2))
    assert one.subproblems >= 64
    assert one.loss == two.loss
    assert one.pattern.to_bitstring() == two.pattern.to_bitstring()
    assert one.network.unit_weights.tobytes() == two.network.unit_weights.tobytes()


def test_options_validation():
    with pytest.raises(ValueError):
        TrainOptions(fixed_coeffs=(1, 0))
    with pytest.raises(ValueError):
        TrainOptions(tie_break="random")
    with pytest.raises(ValueError):
        TrainOptions(threads=0)
    with pytest.raises(ValueError):
        train_exact(pair_data(), 2, TrainOptions(fixed_coeffs=(1,)))


def test_sign_pattern_bits():
    p = SignPattern.from_bitstring("0110", 2, 2)
    assert p.bits.tolist() == [[0, 1], [1, 0]]
    assert p.as_int() == 6 and p.to_bitstring() == "0110"
    with pytest.raises(ValueError):
        SignPattern.from_bitstring("012", 3, 1)


def test_threads_from_env(monkeypatch):
    monkeypatch.delenv("RELU2_THREADS", raising=False)
    assert threads_from_env(3) == 3
    monkeypatch.setenv("RELU2_THREADS", "2")
    assert threads_from_env(1) == 2
    monkeypatch.setenv("RELU2_THREADS", "zero")
    with pytest.raises(ValueError):
        threads_from_env()


def test_result_json_shape():
    d = train_exact(pair_data(), 1).to_dict()
    assert set(d) >= {"loss", "network", "pattern", "coeffs"}
    assert d["pattern"] in ("01", "10")
    assert ReluNetwork.from_dict(d["network"]).k == 1


def test_loss_equals_eval_loss():
    rng = np.random.default_rng(21)
    data = Dataset(rng.standard_normal((3, 2)), rng.standard_normal(3), rng.random(3) + 0.5)
    res = train_exact(data, 2, TrainOptions(tolerances=Tolerances(loss_tol=1e-6)))
    assert res.loss == pytest.approx(eval_loss(res.network, data), abs=1e-15)
