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

import numpy as np
import pytest

from kinetic.langevin.measures.gibbs import ProductMeasure
from kinetic.langevin.model import diffusion, functions, potentials
from kinetic.langevin.model.functions import TestFunction
from kinetic.langevin.model.spec import ModelSpec


def make_model(phi, psi, sigma=None, q=1.0, name=""):
    return ModelSpec(
        1, 1, np.array([[q]]), phi, psi, sigma or diffusion.identity(1), name=name
    )


@pytest.fixture(scope="session")
def ou_model():
    """Kinetic Ornstein-Uhlenbeck: Φ(x) = x²/2, Ψ(y) = y²/2, Q = 1, Σ = 1"""
    return make_model(potentials.quadratic([[1.0]]), potentials.quadratic([[1.0]]), name="ou")


@pytest.fixture(scope="session")
def bounded_sigma_model():
    """Σ(y) = 1 + y²/(1 + y²) with Gaussian Φ and Ψ"""
    return make_model(
        potentials.quadratic([[1.0]]),
        potentials.quadratic([[1.0]]),
        diffusion.scalar_bounded(1.0, 1),
        name="bounded-sigma",
    )


@pytest.fixture(scope="session")
def stretched_model():
    """Φ(x) = (1 + x²)^{1/4} with Gaussian velocities"""
    return make_model(
        potentials.power_law(1.0, 0.5, 1), potentials.quadratic([[1.0]]), name="stretched"
    )


@pytest.fixture(scope="session")
def log_model():
    """Polynomially decaying μ₁ ∝ (1 + x²)^{-(10 + 1)/2}"""
    return make_model(potentials.log_power(10.0, 1), potentials.quadratic([[1.0]]), name="log")


@pytest.fixture(scope="session")
def suite_models(ou_model, bounded_sigma_model, stretched_model):
    return [ou_model, bounded_sigma_model, stretched_model]


@pytest.fixture(scope="session")
def ou_product(ou_model):
    return ProductMeasure.from_potentials(ou_model.phi, ou_model.psi)


def tensor_function(x_fn, y_fn, coef=1.0, name="tensor"):
    return TestFunction.tensor([(coef, x_fn, y_fn)], name=name)


@pytest.fixture(scope="session")
def function_pairs():
    """Five (f, g) pairs of smooth test functions on R x R"""
    x_lin, y_lin = functions.linear([1.0]), functions.linear([1.0])
    x_tanh, y_tanh = functions.tanh([1.5], 0.2), functions.tanh([0.7], -0.3)
    x_bump, y_bump = functions.bump([0.3], 2.0), functions.bump([-0.2], 1.5)
    x_sq, y_sq = functions.monomial([2]), functions.monomial([2])
    one_x, one_y = functions.constant(1.0, 1), functions.constant(1.0, 1)
    linear_xy = TestFunction.linear([1.0], [0.5])
    return [
        (tensor_function(x_tanh, y_tanh), tensor_function(x_bump, y_bump)),
        (linear_xy, tensor_function(x_tanh, one_y)),
        (tensor_function(x_sq, one_y), tensor_function(one_x, y_lin)),
        (tensor_function(x_lin, y_sq), tensor_function(x_bump, y_tanh)),
        (tensor_function(x_bump, y_tanh), tensor_function(x_tanh, y_bump)),
    ]
