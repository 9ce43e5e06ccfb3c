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
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from kinetic.langevin.exceptions import ValidationError


@dataclass(frozen=True)
class LinearGaussianOracle:
    """Exact laws of the linear model with quadratic Φ, Ψ and constant Σ

    With z = (x, y) the dynamics read dz = M(z - m*)dt + noise, where
    M = [[0, QK_y], [-QᵀK_x, -ΣK_y]] and m* is the joint mode. The stationary covariance is
    C = blockdiag(K_x⁻¹, K_y⁻¹).
    """

    drift: np.ndarray
    stationary_mean: np.ndarray
    stationary_covariance: np.ndarray

    @classmethod
    def from_model(cls, model):
        if not (model.phi.gaussian and model.psi.gaussian):
            raise ValidationError("the Gaussian oracle needs quadratic Φ and Ψ")
        if not model.sigma.constant:
            raise ValidationError("the Gaussian oracle needs a constant diffusion field")
        k_x, g_x = _curvature(model.phi)
        k_y, g_y = _curvature(model.psi)
        sigma = np.asarray(model.sigma.matrix(np.zeros((1, model.d2))), dtype=float)[0]
        q = model.Q

        drift = np.block(
            [
                [np.zeros((model.d1, model.d1)), q @ k_y],
                [-q.T @ k_x, -sigma @ k_y],
            ]
        )
        mean = np.concatenate([np.linalg.solve(k_x, g_x), np.linalg.solve(k_y, g_y)])
        covariance = linalg.block_diag(np.linalg.inv(k_x), np.linalg.inv(k_y))
        return cls(drift, mean, covariance)

    @property
    def spectral_abscissa(self):
        return float(np.max(np.linalg.eigvals(self.drift).real))

    def propagator(self, t):
        return linalg.expm(float(t) * self.drift)

    def mean(self, t, z0):
        """E_{z0}[Z_t] = m* + e^{tM}(z0 - m*)"""
        z0 = np.asarray(z0, dtype=float)
        return self.stationary_mean + self.propagator(t) @ (z0 - self.stationary_mean)

    def transition(self, c, z0, t, offset=0.0):
        """p_t f(z0) for the linear observable f(z) = cᵀz + offset"""
        return float(np.dot(c, self.mean(t, z0)) + offset)

    def variance(self, t, c):
        """Var_μ(p_t f) = cᵀ e^{tM} C e^{tMᵀ} c for f(z) = cᵀz, for scalar or array ``t``"""
        c = np.asarray(c, dtype=float)
        times = np.atleast_1d(np.asarray(t, dtype=float))
        values = np.empty(len(times))
        for k, time in enumerate(times):
            v = self.propagator(time).T @ c
            values[k] = v @ self.stationary_covariance @ v
        return values if np.ndim(t) else float(values[0])


def _curvature(potential):
    # 0.5|Λz - a|² has gradient Kz - g with K = ΛᵀΛ and g = Λᵀa
    matrix = np.asarray(potential.params["matrix"], dtype=float)
    shift = np.asarray(potential.params["shift"], dtype=float)
    return matrix.T @ matrix, matrix.T @ shift
