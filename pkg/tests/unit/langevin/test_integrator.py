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
from kinetic.langevin.model import diffusion, potentials
from kinetic.langevin.model.spec import ModelSpec
from kinetic.langevin.sde.integrator import IntegratorConfig, em_step, noise_factor
from kinetic.langevin.sde.streams import IncrementSource, start_sequence, trajectory_stream
from tests.conftest import make_model


def test_em_step_on_ou(ou_model):
    x, y = em_step(ou_model, (np.array([[0.0]]), np.array([[1.0]])), 0.1, np.zeros((1, 1)))
    assert x[0, 0] == pytest.approx(0.1)
    assert y[0, 0] == pytest.approx(0.9)


def test_em_step_scales_noise_by_the_square_root_factor():
    model = make_model(
        potentials.quadratic([[1.0]]), potentials.quadratic([[1.0]]), diffusion.constant([[4.0]])
    )
    origin = np.zeros((1, 1))
    _, y = em_step(model, (origin, origin), 0.01, np.ones((1, 1)))
    assert y[0, 0] == pytest.approx(2.0 * math.sqrt(0.02))


@pytest.mark.parametrize("factorization", ["cholesky", "symmetric_sqrt"])
def test_noise_factor_reproduces_the_diffusion(factorization):
    model = ModelSpec(
        1,
        2,
        np.array([[1.0, 0.0]]),
        potentials.quadratic(np.eye(1)),
        potentials.quadratic(np.eye(2)),
        diffusion.constant([[2.0, 0.5], [0.5, 1.0]]),
    )
    y = np.random.default_rng(0).normal(size=(5, 2))
    sigma = noise_factor(model, y, factorization)
    np.testing.assert_allclose(sigma @ np.swapaxes(sigma, -1, -2), model.sigma.matrix(y))
    if factorization == "symmetric_sqrt":
        np.testing.assert_allclose(sigma, np.swapaxes(sigma, -1, -2))
    else:
        np.testing.assert_array_equal(np.triu(sigma[0], 1), 0.0)


def test_noise_factor_reports_lost_ellipticity(ou_model):
    broken = diffusion.DiffusionField(
        1, lambda y: -np.ones(np.shape(y)[:-1] + (1, 1)), None, ellipticity=1.0
    )
    model = make_model(ou_model.phi, ou_model.psi, broken)
    for factorization in ("cholesky", "symmetric_sqrt"):
        with pytest.raises(NumericalError, match="uniform ellipticity"):
            noise_factor(model, np.zeros((2, 1)), factorization)


def test_em_step_rejects_mismatched_shapes(ou_model):
    with pytest.raises(ValidationError):
        em_step(ou_model, (np.zeros((2, 1)), np.zeros((2, 1))), 0.1, np.zeros((3, 1)))
    with pytest.raises(ValidationError):
        em_step(ou_model, (np.zeros((2, 2)), np.zeros((2, 1))), 0.1, np.zeros((2, 1)))


def test_config_validation():
    with pytest.raises(ValidationError) as exc:
        IntegratorConfig(h=0.0)
    assert exc.value.key_path == "h"
    with pytest.raises(ValidationError) as exc:
        IntegratorConfig(h=1.0, horizon=0.5)
    assert exc.value.key_path == "horizon"
    with pytest.raises(ValidationError) as exc:
        IntegratorConfig(scheme="milstein")
    assert exc.value.key_path == "scheme"


@pytest.mark.parametrize(
    "config,key_path",
    [
        ({"h": -1.0}, "integrator.h"),
        ({"factorization": "lu"}, "integrator.factorization"),
        ({"workers": 0}, "integrator.workers"),
        ({"block_size": 0}, "integrator.block_size"),
        ({"overflow_guard": 0.0}, "integrator.overflow_guard"),
        ({"order": 2}, "integrator"),
    ],
)
def test_from_config_reports_key_path(config, key_path):
    with pytest.raises(ValidationError) as exc:
        IntegratorConfig.from_config(config)
    assert exc.value.key_path == key_path


def test_steps_on_the_grid():
    config = IntegratorConfig(h=0.01, horizon=5.0)
    assert config.steps(0.0) == 0
    assert config.steps(0.3) == 30
    assert config.steps(5.0) == 500
    with pytest.raises(ValidationError, match="not a multiple"):
        config.steps(0.005)
    with pytest.raises(ValidationError, match="outside"):
        config.steps(6.0)


def test_stability_cap(ou_model):
    assert IntegratorConfig(h=0.1).check_stability(ou_model) == pytest.approx(0.3)
    with pytest.raises(ValidationError) as exc:
        IntegratorConfig(h=0.2).check_stability(ou_model)
    assert exc.value.key_path == "h"


def test_trajectory_streams_are_keyed_by_index_and_pair():
    a = trajectory_stream(7, 3).standard_normal(4)
    np.testing.assert_array_equal(a, trajectory_stream(7, 3).standard_normal(4))
    assert not np.array_equal(a, trajectory_stream(7, 4).standard_normal(4))
    assert not np.array_equal(a, trajectory_stream(7, 3, pair=1).standard_normal(4))
    assert not np.array_equal(a, trajectory_stream(8, 3).standard_normal(4))
    starts = np.random.Generator(np.random.Philox(start_sequence(7, 1))).standard_normal(4)
    assert not np.array_equal(a, starts)


@pytest.mark.parametrize("seed", [-1, 1.5, "1", True])
def test_seed_must_be_a_nonnegative_integer(seed):
    with pytest.raises(ValidationError) as exc:
        trajectory_stream(seed, 0)
    assert exc.value.key_path == "seed"


def test_increment_source_is_independent_of_grouping():
    together = IncrementSource(5, range(4), 2, chunk=3)
    alone = IncrementSource(5, [2], 2, chunk=5)
    steps_together = np.stack([together.next() for _ in range(7)])
    steps_alone = np.stack([alone.next() for _ in range(7)])
    assert steps_together.shape == (7, 4, 2)
    np.testing.assert_array_equal(steps_together[:, 2], steps_alone[:, 0])
