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
import json

import numpy as np
import pytest

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model import diffusion, functions, potentials
from kinetic.langevin.model.functions import TestFunction
from kinetic.langevin.model.operators import apply_L, carre_du_champ
from kinetic.langevin.model.spec import ModelSpec
from kinetic.langevin.model.transforms import normalize_quadratic

MODEL_CONFIG = {
    "name": "ou-like",
    "dims": [1, 2],
    "Q": [1.0, 0.5],
    "phi": {"family": "power_law", "params": {"kappa": 1.0, "eps": 1.5}},
    "psi": {"family": "quadratic", "params": {"matrix": [[2.0, 0.3], [0.0, 1.0]]}},
    "sigma": {"family": "scalar_bounded", "params": {"s": 0.5}},
}


def test_from_config():
    model = ModelSpec.from_config(MODEL_CONFIG)
    assert (model.d1, model.d2) == (1, 2)
    np.testing.assert_array_equal(model.Q, [[1.0, 0.5]])
    assert model.sigma.family == diffusion.SCALAR_BOUNDED
    assert model.coupling_gram[0, 0] == pytest.approx(1.25)
    model.require_invertible_coupling()


def test_config_round_trip():
    model = ModelSpec.from_config(MODEL_CONFIG)
    rebuilt = ModelSpec.from_config(json.loads(json.dumps(model.to_config())))
    assert rebuilt.to_config() == model.to_config()


def test_from_file(tmpdir):
    path = tmpdir.join("model.json")
    path.write(json.dumps(MODEL_CONFIG))
    model = ModelSpec.from_file(str(path))
    assert model.name == "ou-like"


def test_from_file_errors(tmpdir):
    with pytest.raises(ValidationError, match="does not exist"):
        ModelSpec.from_file(str(tmpdir.join("missing.json")))
    broken = tmpdir.join("broken.json")
    broken.write("{")
    with pytest.raises(ValidationError, match="not valid JSON"):
        ModelSpec.from_file(str(broken))


def test_coupling_must_be_invertible_for_rates():
    config = dict(MODEL_CONFIG, dims=[2, 1], Q=[[1.0], [1.0]])
    config["phi"] = {"family": "quadratic"}
    config["psi"] = {"family": "quadratic"}
    config["sigma"] = None
    model = ModelSpec.from_config(config)
    with pytest.raises(ValidationError) as exc:
        model.require_invertible_coupling()
    assert exc.value.key_path == "Q"


@pytest.mark.parametrize(
    "patch,key_path",
    [
        ({"extra": 1}, "model"),
        ({"dims": [1, 0]}, "model.dims"),
        ({"dims": [1]}, "model.dims"),
        ({"Q": [1.0, 2.0, 3.0]}, "model.Q"),
        ({"Q": ["a", "b"]}, "model.Q"),
        ({"Q": [float("inf"), 1.0]}, "model.Q"),
        ({"phi": {"family": "power_law", "params": {"eps": -1.0}}}, "model.phi"),
        ({"psi": {"family": "quadratic", "params": {"matrix": [[1.0]]}}}, "model.psi"),
        ({"sigma": {"family": "scalar_bounded"}}, "model.sigma.params.s"),
    ],
)
def test_invalid_models_report_key_path(patch, key_path):
    config = dict(MODEL_CONFIG, **patch)
    with pytest.raises(ValidationError) as exc:
        ModelSpec.from_config(config)
    assert exc.value.key_path.startswith(key_path)


def test_missing_required_keys():
    config = {k: v for k, v in MODEL_CONFIG.items() if k != "psi"}
    with pytest.raises(ValidationError) as exc:
        ModelSpec.from_config(config)
    assert exc.value.key_path == "model.psi"


def test_direct_construction_checks_dimensions():
    phi = potentials.power_law(1.0, 1.0, 1)
    psi = potentials.quadratic(np.eye(2))
    with pytest.raises(ValidationError) as exc:
        ModelSpec(1, 2, np.ones((2, 1)), phi, psi, diffusion.identity(2))
    assert exc.value.key_path == "Q"
    with pytest.raises(ValidationError) as exc:
        ModelSpec(1, 2, np.ones((1, 2)), phi, psi, diffusion.identity(1))
    assert exc.value.key_path == "sigma"


def test_normalize_quadratic_preserves_the_generator():
    lam = np.array([[2.0, 0.3], [0.0, 1.0]])
    shift = np.array([0.5, -0.2])
    model = ModelSpec(
        1,
        2,
        np.array([[1.0, 0.5]]),
        potentials.power_law(1.0, 1.5, 1),
        potentials.quadratic(lam, shift),
        diffusion.scalar_bounded(0.5, 2),
    )
    normalized, transform = normalize_quadratic(model)
    assert normalized.psi.radial
    np.testing.assert_allclose(normalized.Q, model.Q @ lam.T)

    f = TestFunction.tensor(
        [
            (1.0, functions.tanh([1.0], 0.2), functions.tanh([0.7, 0.3])),
            (0.5, functions.monomial([2]), functions.bump([0.1, 0.0], 1.5)),
        ]
    )
    f_prime = transform.map_test_function(f)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(50, 1))
    y = rng.normal(size=(50, 2))
    y_prime = transform.forward(y)
    np.testing.assert_allclose(transform.inverse(y_prime), y, atol=1e-12)
    np.testing.assert_allclose(f_prime(x, y_prime), f(x, y), atol=1e-12)
    np.testing.assert_allclose(
        apply_L(normalized, f_prime, x, y_prime), apply_L(model, f, x, y), atol=1e-9
    )
    np.testing.assert_allclose(
        carre_du_champ(normalized, f_prime, x, y_prime),
        carre_du_champ(model, f, x, y),
        atol=1e-9,
    )


def test_normalize_quadratic_needs_a_quadratic_psi(stretched_model):
    with pytest.raises(ValidationError):
        normalize_quadratic(
            ModelSpec(
                1,
                1,
                np.ones((1, 1)),
                stretched_model.phi,
                stretched_model.phi,
                diffusion.identity(1),
            )
        )
