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
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model.loader import fetch_param, load_custom

IDENTITY = "identity"
CONSTANT = "constant"
SCALAR_BOUNDED = "scalar_bounded"
DIAGONAL_BOUNDED = "diagonal_bounded"
CUSTOM = "custom"

FAMILIES = (IDENTITY, CONSTANT, SCALAR_BOUNDED, DIAGONAL_BOUNDED, CUSTOM)

# max over r >= 0 of 2r / (1 + r^2)^2, attained at r = 1/sqrt(3)
_BUMP_SLOPE = 3.0 * math.sqrt(3.0) / 8.0


@dataclass(frozen=True)
class DiffusionField:
    """Second-order coefficient matrix Σ(y) = (a_ij(y)) of the y-dynamics.

    ``matrix`` maps (..., dim) to (..., dim, dim) and ``gradient`` maps (..., dim) to
    (..., dim, dim, dim) with ``gradient(y)[..., i, j, k] = ∂_k a_ij(y)``. ``ellipticity``
    is c_Σ, i.e. ⟨v, Σ(y) v⟩ >= |v|² / c_Σ. The remaining bounds may be ``None``, in which
    case :func:`coefficient_constants` estimates them on probes.
    """

    dim: int
    matrix: Callable
    gradient: Optional[Callable]
    ellipticity: float
    M_sigma: Optional[float] = None
    B_sigma: Optional[float] = None
    M: Optional[float] = None
    beta: float = 0.0
    p_sigma: float = math.inf
    family: str = CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.ellipticity > 0 or not math.isfinite(self.ellipticity):
            raise ValidationError(f"ellipticity must be in (0, inf), got {self.ellipticity}")
        if not 0.0 <= self.beta < 1.0:
            raise ValidationError(f"beta must be in [0, 1), got {self.beta}")
        if not self.p_sigma > 1.0:
            raise ValidationError(f"p_sigma must be in (1, inf], got {self.p_sigma}")

    @property
    def constant(self):
        return self.family in (IDENTITY, CONSTANT)

    @property
    def N_sigma(self):
        """√(M_Σ² + B_Σ² + d₂M²), ``None`` until all three bounds are known"""
        if None in (self.M_sigma, self.B_sigma, self.M):
            return None
        return math.sqrt(self.M_sigma**2 + self.B_sigma**2 + self.dim * self.M**2)

    def __call__(self, y):
        return self.matrix(y)

    def to_config(self):
        if self.family == CUSTOM:
            return {"family": CUSTOM, **self.params}
        params = {k: np.asarray(v).tolist() for k, v in self.params.items()}
        return {"family": self.family, "params": params}

    @classmethod
    def from_config(cls, config, dim, key_path=""):
        """Build a diffusion field from its configuration block

        Parameters
        ----------
        config: dict
            ``{"family": ..., "params": {...}}``. Families are ``identity``, ``constant``
            (``matrix``), ``scalar_bounded`` (``s``), ``diagonal_bounded`` (``s`` per axis)
            and ``custom`` (``module_name``/``class_name``).
        dim: int
            d₂, the dimension of the y-space
        key_path: str
            Location of the block in the experiment configuration
        """
        config = config or {"family": IDENTITY}
        if not isinstance(config, dict):
            raise ValidationError("diffusion must be a mapping", key_path=key_path)
        family = config.get("family", IDENTITY)

        try:
            if family == IDENTITY:
                sigma = identity(dim)
            elif family == CONSTANT:
                sigma = constant(fetch_param(config, "matrix", key_path, required=True))
            elif family == SCALAR_BOUNDED:
                s = float(fetch_param(config, "s", key_path, required=True))
                sigma = scalar_bounded(s, dim)
            elif family == DIAGONAL_BOUNDED:
                sigma = diagonal_bounded(fetch_param(config, "s", key_path, required=True))
            elif family == CUSTOM:
                sigma = load_custom(config, key_path)
                if not isinstance(sigma, DiffusionField):
                    raise ValidationError(
                        "custom class did not return a DiffusionField", key_path=key_path
                    )
                keys = ("module_name", "class_name", "params")
                params = {k: config[k] for k in keys if k in config}
                sigma = replace(sigma, family=CUSTOM, params=params)
            else:
                raise ValidationError(
                    f"unknown diffusion family '{family}', expected one of {FAMILIES}",
                    key_path=f"{key_path}.family",
                )
        except ValidationError as exc:
            if exc.key_path:
                raise
            raise ValidationError(str(exc), key_path=f"{key_path}.params") from exc

        if sigma.dim != dim:
            raise ValidationError(
                f"diffusion has dimension {sigma.dim}, expected {dim}", key_path=key_path
            )
        return sigma


def identity(dim):
    return replace(constant(np.eye(dim)), family=IDENTITY, params={})


def constant(matrix):
    """Σ(y) ≡ A for a fixed symmetric positive definite A"""
    matrix = np.array(matrix, dtype=float, ndmin=2)
    dim = matrix.shape[0]
    if matrix.shape != (dim, dim) or not np.all(np.isfinite(matrix)):
        raise ValidationError(f"matrix must be a finite square matrix, got shape {matrix.shape}")
    if not np.allclose(matrix, matrix.T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(matrix).max())):
        raise ValidationError("matrix must be symmetric")
    smallest = np.linalg.eigvalsh(matrix)[0]
    if smallest <= 0:
        raise ValidationError(f"matrix must be positive definite, smallest eigenvalue {smallest}")
    matrix.setflags(write=False)

    def value(y):
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(matrix, y.shape[:-1] + (dim, dim)).copy()

    def gradient(y):
        y = np.asarray(y, dtype=float)
        return np.zeros(y.shape[:-1] + (dim, dim, dim))

    return DiffusionField(
        dim,
        value,
        gradient,
        ellipticity=1.0 / smallest,
        M_sigma=float(np.abs(matrix).max()),
        B_sigma=0.0,
        M=0.0,
        family=CONSTANT,
        params={"matrix": matrix},
    )


def scalar_bounded(s, dim):
    """Σ(y) = (1 + s|y|²/(1 + |y|²)) I, uniformly elliptic for s > -1"""
    if not s > -1.0:
        raise ValidationError(f"scalar_bounded needs s > -1, got {s}")

    def value(y):
        y = np.asarray(y, dtype=float)
        r = np.einsum("...i,...i->...", y, y)
        return (1.0 + s * r / (1.0 + r))[..., None, None] * np.eye(dim)

    def gradient(y):
        y = np.asarray(y, dtype=float)
        r = np.einsum("...i,...i->...", y, y)
        slope = (2.0 * s / (1.0 + r) ** 2)[..., None] * y
        return np.eye(dim)[:, :, None] * slope[..., None, None, :]

    return DiffusionField(
        dim,
        value,
        gradient,
        ellipticity=1.0 if s >= 0 else 1.0 / (1.0 + s),
        M_sigma=1.0 + max(s, 0.0),
        B_sigma=abs(s) * _BUMP_SLOPE,
        M=abs(s) * _BUMP_SLOPE,
        family=SCALAR_BOUNDED,
        params={"s": float(s)},
    )


def diagonal_bounded(s):
    """Σ(y) = diag(1 + s_i y_i²/(1 + y_i²))"""
    s = np.array(s, dtype=float, ndmin=1)
    if s.ndim != 1 or not np.all(s > -1.0):
        raise ValidationError(f"diagonal_bounded needs a vector with entries > -1, got {s}")
    dim = s.shape[0]
    s.setflags(write=False)

    def value(y):
        y = np.asarray(y, dtype=float)
        diag = 1.0 + s * y**2 / (1.0 + y**2)
        return diag[..., None] * np.eye(dim)

    def gradient(y):
        y = np.asarray(y, dtype=float)
        slope = 2.0 * s * y / (1.0 + y**2) ** 2
        out = np.zeros(y.shape + (dim, dim))
        axes = np.arange(dim)
        out[..., axes, axes, axes] = slope
        return out

    smallest = float(np.min(1.0 + np.minimum(s, 0.0)))
    return DiffusionField(
        dim,
        value,
        gradient,
        ellipticity=1.0 / smallest,
        M_sigma=float(np.max(1.0 + np.maximum(s, 0.0))),
        B_sigma=float(np.abs(s).max()) * _BUMP_SLOPE,
        M=float(np.abs(s).max()) * _BUMP_SLOPE,
        family=DIAGONAL_BOUNDED,
        params={"s": s},
    )
