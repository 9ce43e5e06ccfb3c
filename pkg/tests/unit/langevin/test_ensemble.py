#
# Copyright (c) 2026, kinetic-langevin developers.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
import math

import numpy as np
import pytest

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.gibbs import ProductMeasure
from kinetic.langevin.model import diffusion, functions, potentials
from kinetic.langevin.model.functions import TestFunction
from kinetic.langevin.model.spec import ModelSpec
from kinetic.langevin.sde import (
    DecayEstimate,
    IntegratorConfig,
    LinearGaussianOracle,
    estimate_decay,
    estimate_transition,
    martingale_residual,
    mean_and_se,
    quadratic_martingale_residual,
    run_ensemble,
    sample_starts,
    simulate_paths,
)
from tests.conftest import tensor_function

CONFIG = IntegratorConfig(h=0.01, horizon=2.0, block_size=512)
POSITION = TestFunction.linear([1.0], [0.0])


def test_mean_and_se():
    mean, se = mean_and_se([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert se == pytest.approx(math.sqrt(1.0 / 3.0))
    assert math.isnan(mean_and_se([4.0])[1])


def test_ensemble_does_not_depend_on_blocks_or_workers(ou_model, ou_product):
    starts = sample_starts(ou_model, 100, seed=3, product=ou_product)
    t_grid = [0.0, 0.25, 0.5]
    serial = run_ensemble(ou_model, IntegratorConfig(h=0.01, block_size=64), starts, 11, t_grid)
    parallel = run_ensemble(
        ou_model, IntegratorConfig(h=0.01, block_size=16, workers=3), starts, 11, t_grid
    )
    assert serial.steps == (0, 25, 50)
    assert serial.states.shape == (3, 100, 2)
    np.testing.assert_array_equal(serial.states, parallel.states)
    np.testing.assert_array_equal(serial.states[0], starts)


def test_pairs_use_independent_streams(ou_model, ou_product):
    starts = sample_starts(ou_model, 10, seed=3, product=ou_product)
    first = run_ensemble(ou_model, CONFIG, starts, 1, [0.5], pair=0)
    second = run_ensemble(ou_model, CONFIG, starts, 1, [0.5], pair=1)
    assert not np.array_equal(first.states, second.states)


def test_running_integrals_are_left_riemann_sums(ou_model):
    starts = np.array([[0.5, -0.5], [1.0, 2.0]])
    config = IntegratorConfig(h=0.1)
    result = run_ensemble(
        ou_model, config, starts, 2, [0.0, 0.1, 0.3], integrands=[lambda x, y: x[:, 0]]
    )
    np.testing.assert_array_equal(result.integrals[0], 0.0)
    np.testing.assert_allclose(result.integrals[1][:, 0], 0.1 * starts[:, 0])
    x, _ = run_ensemble(ou_model, config, starts, 2, [0.0, 0.1, 0.2]).split(1)
    np.testing.assert_allclose(result.integrals[2][:, 0], 0.1 * x.sum(axis=0)[:, 0])


def test_blow_up_is_a_numerical_error(ou_model):
    config = IntegratorConfig(h=0.01, overflow_guard=1e-3)
    with pytest.raises(NumericalError, match="blow-up"):
        run_ensemble(ou_model, config, np.zeros((4, 2)), 0, [0.1])


def test_ensemble_argument_checks(ou_model):
    with pytest.raises(ValidationError):
        run_ensemble(ou_model, CONFIG, np.zeros((4, 3)), 0, [0.1])
    with pytest.raises(ValidationError):
        run_ensemble(ou_model, CONFIG, np.zeros((4, 2)), 0, [0.2, 0.1])
    with pytest.raises(ValidationError):
        run_ensemble(ou_model, IntegratorConfig(h=0.3), np.zeros((4, 2)), 0, [0.3])


def test_transition_against_the_gaussian_oracle(ou_model):
    oracle = LinearGaussianOracle.from_model(ou_model)
    estimate, se = estimate_transition(ou_model, POSITION, (1.0, 0.0), 1.0, 4000, 5, CONFIG)
    exact = oracle.transition([1.0, 0.0], [1.0, 0.0], 1.0)
    assert abs(estimate - exact) < 4.0 * se + 0.01


def test_transition_at_time_zero_is_exact(ou_model):
    f = tensor_function(functions.tanh([1.0]), functions.tanh([1.0]))
    value, se = estimate_transition(ou_model, f, [0.3, -0.2], 0.0, 10, 1, CONFIG)
    assert value == pytest.approx(math.tanh(0.3) * math.tanh(-0.2))
    assert se == 0.0
    with pytest.raises(ValidationError) as exc:
        estimate_transition(ou_model, f, [0.3, -0.2], 0.5, 1, 1, CONFIG)
    assert exc.value.key_path == "M"


def test_decay_against_the_gaussian_oracle(ou_model, ou_product):
    oracle = LinearGaussianOracle.from_model(ou_model)
    t_grid = [0.0, 0.5, 1.0, 2.0]
    decay = estimate_decay(ou_model, POSITION, t_grid, 4000, 17, CONFIG, ou_product)
    exact = oracle.variance(np.array(t_grid), [1.0, 0.0])
    assert decay.mean_f == pytest.approx(0.0, abs=1e-12)
    assert np.all(np.abs(decay.v_hat - exact) < 4.0 * decay.se + 0.02)
    assert decay.n_inner == 2
    frame = decay.to_frame()
    assert list(frame.columns) == ["t", "v_hat", "se", "n_outer", "h", "seed"]
    assert frame["seed"].unique().tolist() == [17]


def test_decay_is_reproducible(ou_model, ou_product):
    a = estimate_decay(ou_model, POSITION, [0.0, 0.5], 50, 4, CONFIG, ou_product)
    b = estimate_decay(ou_model, POSITION, [0.0, 0.5], 50, 4, CONFIG, ou_product)
    np.testing.assert_array_equal(a.v_hat, b.v_hat)
    np.testing.assert_array_equal(a.se, b.se)


def test_constant_function_has_no_variance(ou_model, ou_product):
    one = tensor_function(functions.constant(1.0, 1), functions.constant(1.0, 1))
    decay = estimate_decay(ou_model, one, [0.0, 0.5, 1.0], 50, 2, CONFIG, ou_product)
    np.testing.assert_allclose(decay.v_hat, 0.0, atol=1e-12)
    np.testing.assert_array_equal(decay.se, 0.0)


def test_decay_argument_checks(ou_model, ou_product):
    with pytest.raises(ValidationError):
        estimate_decay(ou_model, POSITION, [0.0, 0.5], 1, 2, CONFIG, ou_product)
    with pytest.raises(ValidationError):
        estimate_decay(ou_model, POSITION, [0.5, 0.0], 10, 2, CONFIG, ou_product)
    with pytest.raises(NumericalError):
        DecayEstimate(np.zeros(1), np.zeros(1), np.array([np.nan]), 1, 2, 0, 0.1)


def test_martingale_residuals_vanish_in_mean(bounded_sigma_model, function_pairs):
    f = function_pairs[0][0]
    mean, se = martingale_residual(bounded_sigma_model, f, 0.5, 3000, 8, CONFIG)
    assert abs(mean) < 4.0 * se + 0.01
    mean, se = quadratic_martingale_residual(bounded_sigma_model, f, 0.5, 3000, 8, CONFIG)
    assert abs(mean) < 4.0 * se + 0.01
    assert martingale_residual(bounded_sigma_model, f, 0.0, 10, 8, CONFIG) == (0.0, 0.0)


def test_simulate_paths(ou_model):
    paths = simulate_paths(ou_model, (0.5, -0.5), [0.0, 0.1, 0.2], 6, 3, CONFIG)
    assert paths.shape == (6, 3, 2)
    np.testing.assert_array_equal(paths[:, 0], np.tile([0.5, -0.5], (6, 1)))
    stationary = simulate_paths(ou_model, "stationary", [0.0, 0.1], 6, 3, CONFIG)
    assert not np.allclose(stationary[:, 0], stationary[0, 0])
    with pytest.raises(ValidationError) as exc:
        simulate_paths(ou_model, "origin", [0.0], 2, 3, CONFIG)
    assert exc.value.key_path == "start"
    with pytest.raises(ValidationError):
        simulate_paths(ou_model, (0.5, -0.5), [0.0], 0, 3, CONFIG)
    with pytest.raises(ValidationError):
        simulate_paths(ou_model, (0.5, -0.5, 1.0), [0.0], 2, 3, CONFIG)


def test_position_square_martingale_bias_is_first_order(ou_model, ou_product):
    # for f = x² the only residual is the Euler term h Σ h y_n² ≈ h t μ₂(y²)
    square = tensor_function(functions.monomial([2]), functions.constant(1.0, 1))
    means = []
    for h in (0.02, 0.01):
        config = IntegratorConfig(h=h, horizon=1.0, block_size=2048)
        mean, se = martingale_residual(ou_model, square, 1.0, 10_000, 21, config, ou_product)
        assert abs(mean) <= 3.0 * se + 2.0 * h
        assert mean == pytest.approx(h, rel=0.1)
        means.append(mean)
    assert means[0] / means[1] == pytest.approx(2.0, rel=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("model_name", ["ou_model", "bounded_sigma_model", "stretched_model"])
def test_halving_the_step_keeps_the_decay(request, model_name):
    model = request.getfixturevalue(model_name)
    f = tensor_function(functions.tanh([1.0]), functions.constant(1.0, 1))
    t_grid = [0.0, 0.5, 1.0, 2.0]
    coarse, fine = (
        estimate_decay(model, f, t_grid, 4000, 13, IntegratorConfig(h=h, horizon=2.0))
        for h in (0.02, 0.01)
    )
    assert np.all(np.abs(coarse.v_hat - fine.v_hat) < 3.0 * (coarse.se + fine.se))


@pytest.mark.parametrize("model_name", ["ou_model", "bounded_sigma_model", "stretched_model"])
def test_stationary_starts_stay_stationary(request, model_name):
    model = request.getfixturevalue(model_name)
    f = TestFunction.tensor(
        [
            (1.0, functions.monomial([2]), functions.constant(1.0, 1)),
            (1.0, functions.tanh([1.0]), functions.monomial([2])),
        ]
    )
    product = ProductMeasure.from_potentials(model.phi, model.psi)
    starts = sample_starts(model, 4000, 6, product)
    result = run_ensemble(model, IntegratorConfig(h=0.01, horizon=1.0), starts, 6, [1.0])
    x, y = result.split(model.d1)
    mean, se = mean_and_se(f.value(x[0], y[0]))
    assert abs(mean - product.integrate(f.value)) < 4.0 * se


def test_noise_factorizations_agree_in_distribution():
    model = ModelSpec(
        2,
        2,
        np.eye(2),
        potentials.quadratic(np.eye(2)),
        potentials.quadratic(np.eye(2)),
        diffusion.constant([[2.0, 1.0], [1.0, 2.0]]),
    )
    f = TestFunction.linear([1.0, 0.0], [0.0, 0.0])
    t_grid = [0.0, 0.5, 1.0]
    cholesky, symmetric = (
        estimate_decay(model, f, t_grid, 3000, 9, IntegratorConfig(h=0.01, factorization=name))
        for name in ("cholesky", "symmetric_sqrt")
    )
    assert not np.array_equal(cholesky.v_hat[1:], symmetric.v_hat[1:])
    assert cholesky.v_hat[0] == symmetric.v_hat[0]
    assert np.all(np.abs(cholesky.v_hat - symmetric.v_hat) <= 3.0 * (cholesky.se + symmetric.se))
