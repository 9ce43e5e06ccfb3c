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
from scipy import special, stats

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model.loader import fetch_param, load_custom

POWER_LAW = "power_law"
LOG_POWER = "log_power"
QUADRATIC = "quadratic"
CUSTOM = "custom"

FAMILIES = (POWER_LAW, LOG_POWER, QUADRATIC, CUSTOM)


@dataclass(frozen=True)
class PotentialMetadata:
    """Growth constants of a potential, all optional.

    ``K``/``alpha`` bound the Hessian, |∇²V| <= K(1 + |∇V|^alpha), ``C`` the x-potential
    Hessian, |∇²V| <= C(1 + |∇V|), and ``N``/``gamma`` the gradient growth,
    |∇V(x)| <= N(1 + |x|^gamma). Missing values fall back to :meth:`PotentialSpec.growth_bounds`.
    """

    K: Optional[float] = None
    alpha: Optional[float] = None
    C: Optional[float] = None
    N: Optional[float] = None
    gamma: Optional[float] = None

    @classmethod
    def from_config(cls, config, key_path=""):
        config = config or {}
        unknown = set(config) - {"K", "alpha", "C", "N", "gamma"}
        if unknown:
            raise ValidationError(f"unknown metadata keys {sorted(unknown)}", key_path=key_path)
        values = {}
        for name, value in config.items():
            if value is not None and not np.isfinite(value):
                raise ValidationError("must be finite", key_path=f"{key_path}.{name}")
            values[name] = None if value is None else float(value)
        return cls(**values)

    def to_config(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class PotentialSpec:
    """A potential V on R^dim with analytic derivatives.

    The callbacks are vectorized over leading axes: ``value`` maps (..., dim) to (...),
    ``gradient`` to (..., dim) and ``hessian`` to (..., dim, dim). For the custom family the
    supplied gradient is the fixed version of ∇V used everywhere else.
    """

    family: str
    dim: int
    value: Callable
    gradient: Callable
    hessian: Callable
    params: dict = field(default_factory=dict)
    metadata: PotentialMetadata = field(default_factory=PotentialMetadata)
    # user asserted integrability, only consulted for the custom family
    integrable: bool = True
    radial: bool = False

    def __call__(self, x):
        return self.value(x)

    @property
    def gaussian(self):
        return self.family == QUADRATIC

    def with_metadata(self, **kwargs):
        return replace(self, metadata=replace(self.metadata, **kwargs))

    def tail_bound(self, radius):
        """Upper bound of the unnormalized mass of e^{-V} outside the cube [-R, R]^dim

        Returns ``None`` when the family gives no analytic handle on its tail (custom), and
        ``inf`` when e^{-V} is not integrable at all.
        """
        if self.family == POWER_LAW:
            return _power_law_tail(self.params["kappa"], self.params["eps"], self.dim, radius)
        if self.family == LOG_POWER:
            exponent = self.params["tail"] + self.params["dimension"]
            return _log_power_tail(exponent, self.dim, radius)
        if self.family == QUADRATIC:
            return _quadratic_tail(self.params["matrix"], self.params["shift"], radius)
        return None

    def radial_deviation(self, points):
        """Relative gap |V(y) - V(|y| e₁)| / max(1, |V(y)|) at each point, 0 for radial V"""
        points = np.asarray(points, dtype=float)
        values = np.asarray(self.value(points), dtype=float)
        on_axis = np.zeros_like(points)
        on_axis[..., 0] = np.linalg.norm(points, axis=-1)
        return np.abs(values - self.value(on_axis)) / np.maximum(1.0, np.abs(values))

    def growth_bounds(self):
        """Closed-form C, N and gamma of the built-in families, ``None`` for custom ones

        C bounds |∇²V| <= C(1 + |∇V|) with the Frobenius norm and N bounds
        |∇V(x)| <= N(1 + |x|^gamma).
        """
        root_dim = math.sqrt(self.dim)
        if self.family == QUADRATIC:
            gram = self.params["matrix"].T @ self.params["matrix"]
            offset = float(np.linalg.norm(self.params["matrix"].T @ self.params["shift"]))
            C = float(np.linalg.norm(gram))
            N = max(float(np.linalg.norm(gram, 2)), offset)
            return PotentialMetadata(C=C, N=N, gamma=1.0)
        if self.family == POWER_LAW:
            kappa, eps = self.params["kappa"], self.params["eps"]
            gamma = max(eps - 1.0, 0.0)
            # |∇V| = s|x| and the Hessian eigenvalues are s and s(1 + (eps-1)|x|²)/(1 + |x|²)
            # with s = kappa eps (1 + |x|²)^{eps/2 - 1}
            slope = max(1.0, kappa * eps * 2.0 ** max(eps / 2.0 - 1.0, 0.0))
            C = root_dim * max(1.0, abs(eps - 1.0)) * slope
            N = kappa * eps * max(1.0, 2.0 ** (gamma - 1.0))
            return PotentialMetadata(C=C, N=N, gamma=gamma)
        if self.family == LOG_POWER:
            strength = (self.params["tail"] + self.params["dimension"]) / 2.0
            return PotentialMetadata(C=2.0 * abs(strength) * root_dim, N=abs(strength), gamma=0.0)
        return None

    def exact_normalization(self):
        """Z(V) in closed form when the family admits one"""
        if self.family == QUADRATIC:
            det = abs(np.linalg.det(self.params["matrix"]))
            return (2.0 * math.pi) ** (self.dim / 2.0) / det
        return None

    def to_config(self):
        if self.family == CUSTOM:
            return {"family": CUSTOM, **self.params}
        params = {k: np.asarray(v).tolist() for k, v in self.params.items()}
        return {"family": self.family, "params": params, "metadata": self.metadata.to_config()}

    @classmethod
    def from_config(cls, config, dim, key_path=""):
        """Build a potential from its configuration block

        Parameters
        ----------
        config: dict
            ``{"family": ..., "params": {...}, "metadata": {...}}``; the custom family takes
            ``module_name``/``class_name`` instead of params.
        dim: int
            Dimension of the space the potential lives on
        key_path: str
            Location of the block in the experiment configuration, used in error messages
        """
        if not isinstance(config, dict):
            raise ValidationError("potential must be a mapping", key_path=key_path)
        family = config.get("family")
        metadata = PotentialMetadata.from_config(config.get("metadata"), f"{key_path}.metadata")

        try:
            potential = _builtin(family, config, dim, key_path, metadata)
        except ValidationError as exc:
            if exc.key_path:
                raise
            raise ValidationError(exc.message, key_path=f"{key_path}.params") from exc

        if potential is None and family == CUSTOM:
            potential = load_custom(config, key_path)
            if not isinstance(potential, PotentialSpec):
                raise ValidationError(
                    "custom class did not return a PotentialSpec", key_path=key_path
                )
            potential = replace(potential, family=CUSTOM, params=_custom_params(config))
        elif potential is None:
            raise ValidationError(
                f"unknown potential family '{family}', expected one of {FAMILIES}",
                key_path=f"{key_path}.family",
            )

        if potential.dim != dim:
            raise ValidationError(
                f"potential has dimension {potential.dim}, expected {dim}", key_path=key_path
            )
        return potential


def _builtin(family, config, dim, key_path, metadata):
    if family == POWER_LAW:
        kappa = float(fetch_param(config, "kappa", key_path, default=1.0))
        eps = float(fetch_param(config, "eps", key_path, required=True))
        return power_law(kappa, eps, dim, metadata=metadata)
    if family == LOG_POWER:
        tail = float(fetch_param(config, "tail", key_path, required=True))
        dimension = float(fetch_param(config, "dimension", key_path, default=dim))
        return log_power(tail, dim, dimension=dimension, metadata=metadata)
    if family == QUADRATIC:
        matrix = fetch_param(config, "matrix", key_path, default=np.eye(dim))
        shift = fetch_param(config, "shift", key_path, default=np.zeros(dim))
        return quadratic(matrix, shift, metadata=metadata)
    return None


def power_law(kappa, eps, dim, metadata=None):
    """V(x) = kappa (1 + |x|^2)^{eps/2}"""
    if kappa <= 0 or eps <= 0:
        raise ValidationError(f"power law needs kappa > 0 and eps > 0, got {kappa}, {eps}")

    def value(x):
        return kappa * (1.0 + _sqnorm(x)) ** (eps / 2.0)

    def gradient(x):
        x = np.asarray(x, dtype=float)
        scale = kappa * eps * (1.0 + _sqnorm(x)) ** (eps / 2.0 - 1.0)
        return scale[..., None] * x

    def hessian(x):
        x = np.asarray(x, dtype=float)
        s = 1.0 + _sqnorm(x)
        a = kappa * eps * s ** (eps / 2.0 - 1.0)
        b = kappa * eps * (eps - 2.0) * s ** (eps / 2.0 - 2.0)
        return a[..., None, None] * np.eye(dim) + b[..., None, None] * _outer(x)

    metadata = metadata or PotentialMetadata()
    if metadata.alpha is None:
        metadata = replace(metadata, alpha=1.0)
    return PotentialSpec(
        POWER_LAW,
        dim,
        value,
        gradient,
        hessian,
        params={"kappa": float(kappa), "eps": float(eps)},
        metadata=metadata,
        radial=True,
    )


def log_power(tail, dim, dimension=None, metadata=None):
    """V(x) = ((tail + dimension) / 2) log(1 + |x|^2)

    ``dimension`` is the family parameter d of the polynomially decaying measures and
    defaults to the space dimension; e^{-V} is integrable iff tail + dimension > dim.
    """
    dimension = dim if dimension is None else dimension
    strength = (tail + dimension) / 2.0

    def value(x):
        return strength * np.log1p(_sqnorm(x))

    def gradient(x):
        x = np.asarray(x, dtype=float)
        return (2.0 * strength / (1.0 + _sqnorm(x)))[..., None] * x

    def hessian(x):
        x = np.asarray(x, dtype=float)
        s = 1.0 + _sqnorm(x)
        a = 2.0 * strength / s
        b = -4.0 * strength / s**2
        return a[..., None, None] * np.eye(dim) + b[..., None, None] * _outer(x)

    metadata = metadata or PotentialMetadata()
    if metadata.alpha is None:
        metadata = replace(metadata, alpha=1.0)
    return PotentialSpec(
        LOG_POWER,
        dim,
        value,
        gradient,
        hessian,
        params={"tail": float(tail), "dimension": float(dimension)},
        metadata=metadata,
        radial=True,
    )


def quadratic(matrix, shift=None, metadata=None):
    """V(y) = psi(|Λy - a|^2) with psi(r) = r/2, i.e. a Gaussian potential"""
    matrix = np.array(matrix, dtype=float, ndmin=2)
    dim = matrix.shape[0]
    if matrix.shape != (dim, dim) or not np.all(np.isfinite(matrix)):
        raise ValidationError(f"matrix must be a finite square matrix, got shape {matrix.shape}")
    if abs(np.linalg.det(matrix)) < 1e-12:
        raise ValidationError("matrix must be invertible")
    shift = np.zeros(dim) if shift is None else np.array(shift, dtype=float).reshape(dim)
    gram = matrix.T @ matrix
    matrix.setflags(write=False)
    shift.setflags(write=False)

    def value(y):
        r = np.asarray(y, dtype=float) @ matrix.T - shift
        return 0.5 * _sqnorm(r)

    def gradient(y):
        return (np.asarray(y, dtype=float) @ matrix.T - shift) @ matrix

    def hessian(y):
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(gram, y.shape[:-1] + (dim, dim)).copy()

    metadata = metadata or PotentialMetadata()
    if metadata.alpha is None:
        metadata = replace(metadata, alpha=1.0)
    radial = bool(np.allclose(gram, gram[0, 0] * np.eye(dim)) and not np.any(shift))
    return PotentialSpec(
        QUADRATIC,
        dim,
        value,
        gradient,
        hessian,
        params={"matrix": matrix, "shift": shift},
        metadata=metadata,
        radial=radial,
    )


def custom(dim, value, gradient, hessian, metadata=None, integrable=True, radial=False):
    """Wrap user callbacks; ``integrable`` is the caller's assertion that Z(V) < inf"""
    return PotentialSpec(
        CUSTOM,
        dim,
        value,
        gradient,
        hessian,
        metadata=metadata or PotentialMetadata(),
        integrable=integrable,
        radial=radial,
    )


def _custom_params(config):
    return {k: config[k] for k in ("module_name", "class_name", "params") if k in config}


def _sphere_area(dim):
    return 2.0 * math.pi ** (dim / 2.0) / special.gamma(dim / 2.0)


def _power_law_tail(kappa, eps, dim, radius):
    # (1 + r^2)^{eps/2} >= r^eps, then the radial integral is an upper incomplete gamma
    shape = dim / eps
    radial = special.gamma(shape) * special.gammaincc(shape, kappa * radius**eps)
    return _sphere_area(dim) * radial / (eps * kappa**shape)


def _log_power_tail(exponent, dim, radius):
    if exponent <= dim:
        return math.inf
    return _sphere_area(dim) * radius ** (dim - exponent) / (exponent - dim)


def _quadratic_tail(matrix, shift, radius):
    dim = matrix.shape[0]
    center = np.linalg.solve(matrix, shift)
    scale = np.sqrt(np.diag(np.linalg.inv(matrix.T @ matrix)))
    outside = stats.norm.sf((radius - center) / scale) + stats.norm.cdf((-radius - center) / scale)
    z = (2.0 * math.pi) ** (dim / 2.0) / abs(np.linalg.det(matrix))
    return z * float(np.sum(outside))


def _sqnorm(x):
    x = np.asarray(x, dtype=float)
    return np.einsum("...i,...i->...", x, x)


def _outer(x):
    return x[..., :, None] * x[..., None, :]
