import numpy as np
import pytest

from relu2.core import Dataset, eval_loss
from relu2.trainer import (NotRealizable, brute_force_oracle, oracle_resolution_bound, train_epsnet, train_exact,
                           train_realizable_1relu)
from relu2.trainer.baselines import epsnet_loss_bound, epsnet_points
from relu2.trainer.exact import EnumerationCapExceeded, TrainOptions


def test_realizable_positive_orientation():
    data = Dataset([[1.0, 0.0], [0.0, 1.0]], [0.7, 0.0])
    net = train_realizable_1relu(data)
    w = net.unit_weights[0]
    assert w[0] == pytest.approx(0.7, abs=1e-9) and w[1] <= 1e-9
    assert eval_loss(net, data) <= 1e-9


def test_realizable_negative_orientation():
    net = train_realizable_1relu(Dataset([[1.0, 0.0]], [-0.3]))
    assert net.coeffs.tolist() == [-1.0]
    assert net.unit_weights[0, 0] == pytest.approx(0.3, abs=1e-9)


def test_pair_not_realizable():
    with pytest.raises(NotRealizable):
        train_realizable_1relu(Dataset([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0]))


def test_mixed_sign_labels_not_realizable():
    with pytest.raises(NotRealizable):
        train_realizable_1relu(Dataset([[1.0, 0.0], [0.0, 1.0]], [1.0, -1.0]))


def test_epsnet_covers_ball():
    rng = np.random.default_rng(0)
    P = epsnet_points(2, 0.3)
    assert np.all(np.linalg.norm(P, axis=1) <= 1 + 1e-12)
    Q = rng.standard_normal((500, 2))
    Q *= (rng.random(500) ** 0.5 / np.linalg.norm(Q, axis=1))[:, None]
    dist = np.min(np.linalg.norm(Q[:, None, :] - P[None, :, :], axis=2), axis=1)
    assert dist.max() <= 0.3


def test_epsnet_single_sample():
    res = train_epsnet(Dataset([[1.0, 0.0]], [1.0], bounded=True), 1, 0.1)
    assert 0.0 <= res.loss <= 0.41


def test_epsnet_degenerate_net_is_zero():
    data = Dataset([[0.6, 0.0], [0.0, -0.5]], [0.4, 0.2], bounded=True)
    res = train_epsnet(data, 1, 2.0)
    assert np.all(res.network.unit_weights == 0)
    assert res.loss == pytest.approx((0.16 + 0.04) / 2)


def test_epsnet_needs_bounded_data():
    with pytest.raises(ValueError):
        train_epsnet(Dataset([[1.0]], [1.0]), 1, 0.5)


def test_epsnet_within_bound_of_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n, m = rng.integers(1, 3), rng.integers(1, 4)
        X = rng.standard_normal((m, n))
        X /= np.maximum(1.0, np.linalg.norm(X, axis=1))[:, None]
        data = Dataset(X, rng.uniform(-1, 1, m), bounded=True)
        exact = train_exact(data, 1, TrainOptions(bounded=True))
        net = train_epsnet(data, 1, 0.25)
        assert exact.loss - 1e-9 <= net.loss <= exact.loss + epsnet_loss_bound(1, 0.25) + 1e-9


def test_oracle_examples():
    res = brute_force_oracle(Dataset([[1.0]], [1.0]), 1, 0.25, 1.0)
    assert res.loss == 0.0 and res.network.unit_weights[0, 0] == 1.0
    res = brute_force_oracle(Dataset([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0]), 1, 0.25, 1.0)
    assert res.loss == 0.5


def test_oracle_cap():
    with pytest.raises(EnumerationCapExceeded):
        brute_force_oracle(Dataset(np.eye(3), np.ones(3)), 2, 0.01, 1.0, cap=1000)


def test_oracle_resolution_bound_is_sound():
    rng = np.random.default_rng(7)
    for _ in range(10):
        X = rng.uniform(-1, 1, (3, 2))
        X /= np.maximum(1.0, np.linalg.norm(X, axis=1))[:, None]
        data = Dataset(X, rng.uniform(-1, 1, 3), bounded=True)
        exact = train_exact(data, 1, TrainOptions(bounded=True))
        orc = brute_force_oracle(data, 1, 0.1, 1.0, bounded=True)
        assert exact.loss <= orc.loss + 1e-9
        assert orc.loss - exact.loss <= oracle_resolution_bound(data, 1, 0.1, orc.loss) + 1e-12
