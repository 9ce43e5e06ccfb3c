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
from dataclasses import dataclass, replace

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model.diffusion import DiffusionField
from kinetic.langevin.model.functions import TestFunction
from kinetic.langevin.model.potentials import QUADRATIC, quadratic


@dataclass(frozen=True)
class QuadraticTransform:
    """The change of variables y' = Λy - a that makes Ψ(y) = ψ(|Λy - a|²) radial"""

    matrix: np.ndarray
    shift: np.ndarray

    @property
    def inverse_matrix(self):
        return np.linalg.inv(self.matrix)

    def forward(self, y):
        return np.asarray(y, dtype=float) @ self.matrix.T - self.shift

    def inverse(self, y_prime):
        return (np.asarray(y_prime, dtype=float) + self.shift) @ self.inverse_matrix.T

    def map_test_function(self, f):
        """f'(x, y') = f(x, Λ⁻¹(y' + a)) with the chain-ruled derivatives"""
        inv = self.inverse_matrix

        def value(x, y):
            return f.value(x, self.inverse(y))

        def grad_x(x, y):
            return f.grad_x(x, self.inverse(y))

        def grad_y(x, y):
            return f.grad_y(x, self.inverse(y)) @ inv

        def hessian_x(x, y):
            return f.hessian_x(x, self.inverse(y))

        def hessian_y(x, y):
            return inv.T @ f.hessian_y(x, self.inverse(y)) @ inv

        return TestFunction(
            f.d1,
            f.d2,
            value,
            grad_x,
            grad_y,
            hessian_x if f.hessian_x is not None else None,
            hessian_y,
            oscillation=f.oscillation,
            name=f"{f.name}'",
        )


def normalize_quadratic(model):
    """Rewrite a model with Ψ(y) = |Λy - a|²/2 into one with radial Ψ'(y') = |y'|²/2

    The new model has Q' = QΛᵀ and Σ'(y') = ΛΣ(Λ⁻¹(y' + a))Λᵀ, and its generator L'
    satisfies L'f'(x, Λy - a) = Lf(x, y) for f' obtained from
    :meth:`QuadraticTransform.map_test_function`.

    Returns
    -------
    (ModelSpec, QuadraticTransform)
    """
    if model.psi.family != QUADRATIC:
        raise ValidationError(
            f"normalize_quadratic needs a quadratic psi, got '{model.psi.family}'",
            key_path="psi.family",
        )
    lam = np.array(model.psi.params["matrix"], dtype=float)
    shift = np.array(model.psi.params["shift"], dtype=float)
    transform = QuadraticTransform(lam, shift)
    inv = transform.inverse_matrix
    sigma = model.sigma

    def matrix(y_prime):
        return lam @ sigma.matrix(transform.inverse(y_prime)) @ lam.T

    gradient = None
    if sigma.gradient is not None:

        def gradient(y_prime):
            grads = sigma.gradient(transform.inverse(y_prime))
            # ∂'_k a'_ij = Σ_l (Λ ∂_l Σ Λᵀ)_ij (Λ⁻¹)_lk
            return np.einsum("ia,...abl,jb,lk->...ijk", lam, grads, lam, inv)

    smallest_singular = np.linalg.svd(lam, compute_uv=False).min()
    new_sigma = DiffusionField(
        sigma.dim,
        matrix,
        gradient,
        ellipticity=sigma.ellipticity / smallest_singular**2,
        beta=sigma.beta,
        p_sigma=sigma.p_sigma,
        family="custom",
        params={"normalized_from": sigma.to_config()},
    )
    new_psi = quadratic(np.eye(model.d2), metadata=model.psi.metadata)
    new_model = replace(
        model,
        Q=model.Q @ lam.T,
        psi=new_psi,
        sigma=new_sigma,
        name=f"{model.name} (normalized)" if model.name else "normalized",
    )
    return new_model, transform
