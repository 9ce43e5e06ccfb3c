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
import logging
import math
from dataclasses import dataclass

import numpy as np

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.model.operators import drift_b
from kinetic.langevin.model.probes import ProbeSpec

LOG = logging.getLogger("kinetic-langevin")

EULER_MARUYAMA = "euler_maruyama"
CHOLESKY = "cholesky"
SYMMETRIC_SQRT = "symmetric_sqrt"

SCHEMES = (EULER_MARUYAMA,)
FACTORIZATIONS = (CHOLESKY, SYMMETRIC_SQRT)

STABILITY_CAP = 0.5
# relative tolerance when matching a time against the step grid
GRID_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon and numerical options of the path integrator

    Parameters
    ----------
    h: float
        Time step
    horizon: float
        Largest time any estimator may request
    factorization: str
        ``cholesky`` (lower triangular σ) or ``symmetric_sqrt`` (σ = Σ^{1/2})
    overflow_guard: float
        A path whose state exceeds this norm is reported as a blow-up
    block_size: int
        Trajectories advanced together as one vectorized work unit
    workers: int
        Concurrent blocks; results do not depend on it
    """

    h: float = 1e-3
    horizon: float = 20.0
    scheme: str = EULER_MARUYAMA
    factorization: str = CHOLESKY
    overflow_guard: float = 1e8
    block_size: int = 1024
    workers: int = 1
    progress: bool = False

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValidationError(f"step must be positive, got {self.h}", key_path="h")
        if not self.h <= self.horizon:
            raise ValidationError(
                f"step {self.h} exceeds the horizon {self.horizon}", key_path="horizon"
            )
        if self.scheme not in SCHEMES:
            raise ValidationError(
                f"unknown scheme '{self.scheme}', expected one of {SCHEMES}", key_path="scheme"
            )
        if self.factorization not in FACTORIZATIONS:
            raise ValidationError(
                f"unknown factorization '{self.factorization}', expected one of "
                f"{FACTORIZATIONS}",
                key_path="factorization",
            )
        if not self.overflow_guard > 0:
            raise ValidationError("must be positive", key_path="overflow_guard")
        if self.block_size < 1:
            raise ValidationError("must be a positive integer", key_path="block_size")
        if self.workers < 1:
            raise ValidationError("must be a positive integer", key_path="workers")

    @classmethod
    def from_config(cls, config, key_path="integrator"):
        config = dict(config or {})
        known = {
            "h",
            "horizon",
            "scheme",
            "factorization",
            "overflow_guard",
            "block_size",
            "workers",
            "progress",
        }
        unknown = set(config) - known
        if unknown:
            raise ValidationError(f"unknown keys {sorted(unknown)}", key_path=key_path)
        try:
            return cls(**config)
        except ValidationError as exc:
            raise ValidationError(
                exc.message, key_path=f"{key_path}.{exc.key_path}" if exc.key_path else key_path
            ) from exc
        except TypeError as exc:
            raise ValidationError(str(exc), key_path=key_path) from exc

    def steps(self, t):
        """Number of steps reaching time ``t``, which must lie on the step grid"""
        t = float(t)
        if t < 0 or t > self.horizon * (1 + GRID_TOL):
            raise ValidationError(f"time {t} outside [0, {self.horizon}]")
        n = round(t / self.h)
        if abs(n * self.h - t) > GRID_TOL * max(1.0, t):
            raise ValidationError(f"time {t} is not a multiple of the step {self.h}")
        return int(n)

    def check_stability(self, model, probes=None):
        """Require h (1 + |Q|² + sup |∇²Φ|) < 0.5 with the supremum over the probe set"""
        probes = probes or ProbeSpec()
        hessians = np.asarray(model.phi.hessian(probes.points(model.d1)), dtype=float)
        curvature = float(np.max(np.linalg.norm(hessians, ord=2, axis=(-2, -1))))
        coupling = float(np.linalg.norm(model.Q, ord=2)) ** 2
        level = self.h * (1.0 + coupling + curvature)
        if not level < STABILITY_CAP:
            raise ValidationError(
                f"step {self.h} is above the stability cap: h(1+|Q|²+sup|∇²Φ|) = {level:.4g} "
                f">= {STABILITY_CAP}",
                key_path="h",
            )
        LOG.debug("Stability level h(1+|Q|²+sup|∇²Φ|) = %.4g", level)
        return level


def noise_factor(model, y, factorization=CHOLESKY):
    """σ(y) with σσᵀ = Σ(y) for a batch of points (..., d2)"""
    matrix = np.asarray(model.sigma.matrix(y), dtype=float)
    if factorization == CHOLESKY:
        try:
            return np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                "Σ(y) is not positive definite along the path, uniform ellipticity (Σ1) is "
                "violated"
            ) from exc
    if factorization == SYMMETRIC_SQRT:
        values, vectors = np.linalg.eigh(matrix)
        if not np.all(values > 0):
            raise NumericalError(
                f"Σ(y) has eigenvalue {float(values.min()):.4g} along the path, uniform "
                "ellipticity (Σ1) is violated"
            )
        return np.einsum("...ik,...k,...jk->...ij", vectors, np.sqrt(values), vectors)
    raise ValidationError(f"unknown factorization '{factorization}'")


def em_step(model, state, h, xi, factorization=CHOLESKY):
    """One Euler-Maruyama step of dX = Q∇Ψ(Y)dt, dY = √2σ(Y)dB - (Qᵀ∇Φ(X) - b(Y))dt

    Parameters
    ----------
    state: tuple of arrays
        ``(x, y)`` with shapes (..., d1) and (..., d2)
    xi: array
        Standard Gaussian increments of shape (..., d2)

    Returns
    -------
    (x', y'): tuple of arrays
    """
    x, y = (np.asarray(part, dtype=float) for part in state)
    xi = np.asarray(xi, dtype=float)
    if x.shape[-1] != model.d1 or y.shape[-1] != model.d2 or xi.shape != y.shape:
        raise ValidationError(
            f"state shapes {x.shape}, {y.shape} and increment {xi.shape} do not match the "
            f"model dimensions ({model.d1}, {model.d2})"
        )
    sigma = noise_factor(model, y, factorization)
    x_next = x + h * (model.psi.gradient(y) @ model.Q.T)
    drift_y = model.phi.gradient(x) @ model.Q - drift_b(model, y)
    noise = np.einsum("...ij,...j->...i", sigma, xi)
    y_next = y + math.sqrt(2.0 * h) * noise - h * drift_y
    return x_next, y_next
