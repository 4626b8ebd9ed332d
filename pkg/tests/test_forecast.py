import numpy as np
import pytest

from esnlab.experiment import lorenz_forecast
from esnlab.forecast import DivergenceError, autonomous_run, handoff_state, next_step_pairs
from esnlab.reservoir import Esn, EsnParams, drive, make_esn, step
from esnlab.ridge import ReadoutWeights


@pytest.fixture(scope="module")
def small_esn():
    return make_esn(EsnParams(reservoir_size=30, master_seed=8))


def test_zero_readout_zero_bias():
    A = np.full((4, 4), 0.1)
    e = Esn(A, np.ones((4, 1)), np.zeros(4))
    s0 = np.full(4, 0.4)
    run = autonomous_run(e, ReadoutWeights(np.zeros(4), 0.0), s0, 10, keep_states=True)
    assert np.all(run.predictions == 0)
    # With no feedback signal the states follow the unforced map s -> tanh(A s).
    s = s0
    for k in range(10):
        s = np.tanh(A @ s)
        np.testing.assert_allclose(run.states[k], s, rtol=1e-15)
    e0 = Esn(np.zeros((4, 4)), np.ones((4, 1)), np.zeros(4))
    run0 = autonomous_run(e0, ReadoutWeights(np.zeros(4), 0.0), s0, 10, keep_states=True)
    assert np.all(run0.states == 0) and np.all(run0.predictions == 0)


def test_single_step_is_readout_of_s0(small_esn):
    s0 = np.linspace(-0.5, 0.5, 30)
    W = ReadoutWeights(np.linspace(1, 2, 30), 0.0)
    assert autonomous_run(small_esn, W, s0, 1).predictions[0] == W.W @ s0


def test_index_discipline(small_esn):
    rng = np.random.default_rng(1)
    s0 = rng.uniform(-0.5, 0.5, 30)
    W = ReadoutWeights(rng.standard_normal(30) * 0.1, 0.0)
    run = autonomous_run(small_esn, W, s0, 25, keep_states=True)
    s = s0
    for k in range(25):
        v = W.W @ s
        assert run.predictions[k] == v
        s = step(small_esn, s, [v])
        assert run.states[k].tobytes() == s.tobytes()


def test_states_bounded_when_predictions_grow(small_esn):
    W = ReadoutWeights(np.full(30, 40.0), 0.0)
    s0 = np.full(30, 0.5)
    try:
        run = autonomous_run(small_esn, W, s0, 200, keep_states=True)
        assert np.all(np.abs(run.states) <= 1)
    except DivergenceError as exc:
        assert exc.step >= 1


def test_divergence_reported_with_step():
    e = Esn(np.eye(2), np.ones((2, 1)), np.zeros(2))
    with pytest.raises(DivergenceError) as info:
        autonomous_run(e, ReadoutWeights(np.array([1e7, 0.0]), 0.0), np.array([0.5, 0.0]), 5)
    assert info.value.step == 1
    assert info.value.predictions.size == 0


def test_deterministic(small_esn):
    s0 = np.full(30, 0.1)
    W = ReadoutWeights(np.linspace(-1, 1, 30), 0.0)
    a = autonomous_run(small_esn, W, s0, 50).predictions
    b = autonomous_run(small_esn, W, s0, 50).predictions
    assert a.tobytes() == b.tobytes()


def test_feedback_requires_scalar_input():
    e = make_esn(EsnParams(reservoir_size=5, input_dim=2))
    with pytest.raises(ValueError):
        autonomous_run(e, ReadoutWeights(np.zeros(5), 0.0), np.zeros(5), 3)


def test_handoff_state(small_esn):
    z = np.sin(np.arange(40) * 0.3)
    assert handoff_state(small_esn, z[:1], 0).tobytes() == step(small_esn, np.zeros(30), z[:1]).tobytes()
    assert handoff_state(small_esn, z, 10).tobytes() == drive(small_esn, z, None, 10).states[-1].tobytes()


def test_next_step_pairs():
    inputs, targets = next_step_pairs([1.0, 2.0, 3.0, 4.0])
    assert inputs.tolist() == [1.0, 2.0, 3.0] and targets.tolist() == [2.0, 3.0, 4.0]


def test_lorenz_next_step_forecast_bounded(study_cfg):
    result = lorenz_forecast(study_cfg, 4000, 0, 300)
    v = result.run.predictions
    assert v.shape == (300,)
    assert np.all(np.abs(v[:200]) <= 25)
    # The first prediction follows the true continuation closely.
    assert abs(v[0] - result.truth[0]) < 1e-2
