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
import logging
import math
from dataclasses import dataclass

import numpy as np

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.model.diffusion import DiffusionField
from kinetic.langevin.model.potentials import PotentialSpec
from kinetic.langevin.model.probes import ProbeSpec

LOG = logging.getLogger("kinetic-langevin")

MODEL_KEYS = {"dims", "Q", "phi", "psi", "sigma", "name"}


@dataclass(frozen=True)
class CoefficientConstants:
    M_sigma: float
    B_sigma: float
    M: float
    N_sigma: float


@dataclass(frozen=True)
class ModelSpec:
    """A full problem instance: dimensions, coupling Q, potentials Φ and Ψ and the field Σ.

    The dynamics are dX = Q∇Ψ(Y)dt and dY = √2 σ(Y)dB - (Qᵀ∇Φ(X) - b(Y))dt with σσᵀ = Σ.
    """

    d1: int
    d2: int
    Q: np.ndarray
    phi: PotentialSpec
    psi: PotentialSpec
    sigma: DiffusionField
    name: str = ""

    def __post_init__(self):
        for label, value in (("d1", self.d1), ("d2", self.d2)):
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(
                    f"must be a positive integer, got {value}", key_path=label
                )
        q = np.array(self.Q, dtype=float, ndmin=2)
        if q.shape != (self.d1, self.d2):
            raise ValidationError(
                f"expected shape {(self.d1, self.d2)}, got {q.shape}", key_path="Q"
            )
        if not np.all(np.isfinite(q)):
            raise ValidationError("entries must be finite", key_path="Q")
        q.setflags(write=False)
        object.__setattr__(self, "Q", q)

        if self.phi.dim != self.d1:
            raise ValidationError(f"expected dimension {self.d1}", key_path="phi")
        if self.psi.dim != self.d2:
            raise ValidationError(f"expected dimension {self.d2}", key_path="psi")
        if self.sigma.dim != self.d2:
            raise ValidationError(f"expected dimension {self.d2}", key_path="sigma")

    @property
    def coupling_gram(self):
        """QQᵀ, a d1 x d1 matrix"""
        return self.Q @ self.Q.T

    def require_invertible_coupling(self):
        if np.linalg.matrix_rank(self.coupling_gram) < self.d1:
            raise ValidationError("QQ* must be invertible for the rate engine", key_path="Q")

    def constants(self, probes=None):
        return coefficient_constants(self.sigma, probes)

    def to_config(self):
        return {
            "name": self.name,
            "dims": [self.d1, self.d2],
            "Q": self.Q.tolist(),
            "phi": self.phi.to_config(),
            "psi": self.psi.to_config(),
            "sigma": self.sigma.to_config(),
        }

    @classmethod
    def from_config(cls, config, key_path="model"):
        """Build a model from a configuration tree

        Parameters
        ----------
        config: dict
            ``{"dims": [d1, d2], "Q": rows or a flat row-major list, "phi": {...},
            "psi": {...}, "sigma": {...}}``
        key_path: str
            Prefix used when reporting invalid keys
        """
        if not isinstance(config, dict):
            raise ValidationError("model must be a mapping", key_path=key_path)
        unknown = set(config) - MODEL_KEYS
        if unknown:
            raise ValidationError(f"unknown keys {sorted(unknown)}", key_path=key_path)
        for required in ("dims", "Q", "phi", "psi"):
            if required not in config:
                raise ValidationError("missing required key", key_path=f"{key_path}.{required}")

        dims = config["dims"]
        if (
            not isinstance(dims, (list, tuple))
            or len(dims) != 2
            or not all(isinstance(d, int) and d > 0 for d in dims)
        ):
            raise ValidationError(
                f"expected two positive integers, got {dims}", key_path=f"{key_path}.dims"
            )
        d1, d2 = dims

        try:
            q = np.array(config["Q"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"not a numeric matrix: {exc}", key_path=f"{key_path}.Q")
        if q.ndim == 1 and q.size == d1 * d2:
            q = q.reshape(d1, d2)
        elif q.ndim == 0 and d1 * d2 == 1:
            q = q.reshape(1, 1)
        if q.shape != (d1, d2):
            raise ValidationError(
                f"expected a {d1}x{d2} matrix, got shape {q.shape}", key_path=f"{key_path}.Q"
            )
        if not np.all(np.isfinite(q)):
            raise ValidationError("entries must be finite", key_path=f"{key_path}.Q")

        phi = PotentialSpec.from_config(config["phi"], d1, key_path=f"{key_path}.phi")
        psi = PotentialSpec.from_config(config["psi"], d2, key_path=f"{key_path}.psi")
        sigma = DiffusionField.from_config(config.get("sigma"), d2, key_path=f"{key_path}.sigma")
        return cls(d1, d2, q, phi, psi, sigma, name=config.get("name", ""))

    @classmethod
    def from_file(cls, path, key_path="model"):
        try:
            with open(path, "r", encoding="utf-8") as f:
                config = json.load(f)
        except FileNotFoundError as exc:
            raise ValidationError(
                f"model file '{path}' does not exist", key_path=key_path
            ) from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"model file '{path}' is not valid JSON: {exc}", key_path=key_path
            ) from exc
        LOG.debug("Loaded model definition from %s", path)
        return cls.from_config(config, key_path=key_path)


def coefficient_constants(sigma, probes=None):
    """M_Σ, B_Σ, M and N_Σ = √(M_Σ² + B_Σ² + d₂M²) for a diffusion field

    Values carried by the field take precedence; missing ones are maximized over the probe
    set (M_Σ over the whole probe cube, B_Σ over the closed unit ball, M over the cube with
    the growth weight 1_{B1}(y) + |y|^β).
    """
    probes = probes or ProbeSpec()
    m_sigma, b_sigma, m = sigma.M_sigma, sigma.B_sigma, sigma.M

    if m_sigma is None or m is None:
        points = probes.points(sigma.dim)
        if m_sigma is None:
            m_sigma = float(np.max(np.abs(sigma.matrix(points))))
        if m is None:
            grads = _require_gradient(sigma, points)
            norm = np.linalg.norm(points, axis=-1)
            weight = (norm <= 1.0).astype(float) + norm**sigma.beta
            m = float(np.max(np.abs(grads).max(axis=(-3, -2, -1)) / weight))

    if b_sigma is None:
        points = probes.ball(sigma.dim)
        grads = _require_gradient(sigma, points)
        # |∂_j a_ij| entries
        b_sigma = float(np.max(np.abs(np.einsum("...ijj->...ij", grads))))

    n_sigma = math.sqrt(m_sigma**2 + b_sigma**2 + sigma.dim * m**2)
    return CoefficientConstants(m_sigma, b_sigma, m, n_sigma)


def _require_gradient(sigma, points):
    if sigma.gradient is None:
        raise NumericalError("diffusion gradient unavailable")
    grads = np.asarray(sigma.gradient(points), dtype=float)
    if not np.all(np.isfinite(grads)):
        raise NumericalError("diffusion gradient unavailable")
    return grads
