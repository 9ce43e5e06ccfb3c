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
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model.loader import fetch_param, load_custom

SPACE_FAMILIES = ("constant", "linear", "monomial", "tanh", "bump")
TEST_FAMILIES = ("tensor", "linear", "custom")


@dataclass(frozen=True)
class SpaceFunction:
    """A scalar function g on R^dim with analytic gradient and Hessian.

    Callbacks are vectorized like the potentials: (..., dim) -> (...), (..., dim) and
    (..., dim, dim). ``bounds`` is the closed range of g when it is bounded.
    """

    dim: int
    value: Callable
    gradient: Callable
    hessian: Callable
    bounds: Optional[Tuple[float, float]] = None
    support_radius: Optional[float] = None
    name: str = ""

    def __call__(self, z):
        return self.value(z)

    @classmethod
    def from_config(cls, config, dim, key_path=""):
        if not isinstance(config, dict):
            raise ValidationError("function must be a mapping", key_path=key_path)
        family = config.get("family")
        try:
            if family == "constant":
                return constant(float(fetch_param(config, "value", key_path, default=1.0)), dim)
            if family == "linear":
                weights = fetch_param(config, "weights", key_path, required=True)
                offset = float(fetch_param(config, "offset", key_path, default=0.0))
                return linear(weights, offset)
            if family == "monomial":
                return monomial(fetch_param(config, "powers", key_path, required=True))
            if family == "tanh":
                weights = fetch_param(config, "weights", key_path, required=True)
                offset = float(fetch_param(config, "offset", key_path, default=0.0))
                return tanh(weights, offset)
            if family == "bump":
                center = fetch_param(config, "center", key_path, default=np.zeros(dim))
                radius = float(fetch_param(config, "radius", key_path, default=1.0))
                return bump(center, radius)
        except ValidationError as exc:
            if exc.key_path:
                raise
            raise ValidationError(str(exc), key_path=f"{key_path}.params") from exc
        raise ValidationError(
            f"unknown function family '{family}', expected one of {SPACE_FAMILIES}",
            key_path=f"{key_path}.family",
        )


def constant(c, dim):
    def value(z):
        z = np.asarray(z, dtype=float)
        return np.full(z.shape[:-1], float(c))

    def gradient(z):
        return np.zeros(np.shape(z))

    def hessian(z):
        z = np.asarray(z, dtype=float)
        return np.zeros(z.shape + (dim,))

    return SpaceFunction(dim, value, gradient, hessian, bounds=(c, c), name=f"constant({c})")


def linear(weights, offset=0.0):
    """g(z) = ⟨w, z⟩ + offset"""
    weights = np.array(weights, dtype=float, ndmin=1)
    dim = weights.shape[0]
    weights.setflags(write=False)

    def value(z):
        return np.asarray(z, dtype=float) @ weights + offset

    def gradient(z):
        z = np.asarray(z, dtype=float)
        return np.broadcast_to(weights, z.shape).copy()

    def hessian(z):
        z = np.asarray(z, dtype=float)
        return np.zeros(z.shape + (dim,))

    bounds = (offset, offset) if not np.any(weights) else None
    return SpaceFunction(dim, value, gradient, hessian, bounds=bounds, name="linear")


def monomial(powers):
    """g(z) = Π z_i^{k_i} for nonnegative integer powers k"""
    powers = np.array(powers, ndmin=1)
    if powers.ndim != 1 or np.any(powers < 0) or np.any(powers != np.round(powers)):
        raise ValidationError(f"powers must be nonnegative integers, got {powers}")
    powers = powers.astype(int)
    dim = powers.shape[0]

    def _factor(z, k, order):
        # d^order/dz^order of z^k
        if order > k:
            return np.zeros_like(z)
        return math.perm(k, order) * z ** (k - order)

    def _product(z, orders):
        out = np.ones(z.shape[:-1])
        for i in range(dim):
            out = out * _factor(z[..., i], powers[i], orders[i])
        return out

    def value(z):
        return _product(np.asarray(z, dtype=float), np.zeros(dim, dtype=int))

    def gradient(z):
        z = np.asarray(z, dtype=float)
        return np.stack([_product(z, np.eye(dim, dtype=int)[i]) for i in range(dim)], axis=-1)

    def hessian(z):
        z = np.asarray(z, dtype=float)
        out = np.empty(z.shape + (dim,))
        for i in range(dim):
            for j in range(dim):
                orders = np.zeros(dim, dtype=int)
                orders[i] += 1
                orders[j] += 1
                out[..., i, j] = _product(z, orders)
        return out

    bounds = (1.0, 1.0) if not np.any(powers) else None
    name = f"monomial{tuple(powers)}"
    return SpaceFunction(dim, value, gradient, hessian, bounds=bounds, name=name)


def tanh(weights, offset=0.0):
    """g(z) = tanh(⟨w, z⟩ + offset)"""
    weights = np.array(weights, dtype=float, ndmin=1)
    dim = weights.shape[0]
    weights.setflags(write=False)

    def value(z):
        return np.tanh(np.asarray(z, dtype=float) @ weights + offset)

    def gradient(z):
        t = value(z)
        return (1.0 - t**2)[..., None] * weights

    def hessian(z):
        t = value(z)
        return (-2.0 * t * (1.0 - t**2))[..., None, None] * np.outer(weights, weights)

    bounds = (-1.0, 1.0) if np.any(weights) else (math.tanh(offset),) * 2
    return SpaceFunction(dim, value, gradient, hessian, bounds=bounds, name="tanh")


def bump(center, radius=1.0):
    """Smooth compactly supported bump exp(1 - 1/(1 - |z - c|²/ρ²)), equal to 1 at c"""
    center = np.array(center, dtype=float, ndmin=1)
    dim = center.shape[0]
    if not radius > 0:
        raise ValidationError(f"bump radius must be positive, got {radius}")
    center.setflags(write=False)

    def _parts(z):
        u = np.asarray(z, dtype=float) - center
        s = np.einsum("...i,...i->...", u, u) / radius**2
        inside = s < 1.0
        gap = np.where(inside, 1.0 - s, 1.0)
        phi = np.where(inside, np.exp(1.0 - 1.0 / gap), 0.0)
        return u, gap, phi

    def value(z):
        return _parts(z)[2]

    def gradient(z):
        u, gap, phi = _parts(z)
        dphi = -phi / gap**2
        return (2.0 * dphi / radius**2)[..., None] * u

    def hessian(z):
        u, gap, phi = _parts(z)
        dphi = -phi / gap**2
        ddphi = phi * (gap**-4 - 2.0 * gap**-3)
        outer = u[..., :, None] * u[..., None, :]
        return (4.0 * ddphi / radius**4)[..., None, None] * outer + (
            2.0 * dphi / radius**2
        )[..., None, None] * np.eye(dim)

    return SpaceFunction(
        dim, value, gradient, hessian, bounds=(0.0, 1.0), support_radius=radius, name="bump"
    )


@dataclass(frozen=True)
class TestFunction:
    """A function f(x, y) on R^{d1} x R^{d2} with the derivatives L, S, A and G act on.

    ``value(x, y)`` broadcasts over the leading axes of x (..., d1) and y (..., d2);
    ``grad_x``/``grad_y`` return (..., d1)/(..., d2) and ``hessian_x``/``hessian_y`` the
    matching square blocks. ``oscillation`` is sup f - inf f when known.
    """

    __test__ = False

    d1: int
    d2: int
    value: Callable
    grad_x: Callable
    grad_y: Callable
    hessian_x: Optional[Callable]
    hessian_y: Callable
    support_radius: Optional[float] = None
    oscillation: Optional[float] = None
    name: str = ""

    def __call__(self, x, y):
        return self.value(x, y)

    @classmethod
    def tensor(cls, terms, name="tensor"):
        """f(x, y) = Σ c_k g_k(x) h_k(y) from ``(c_k, g_k, h_k)`` triples of SpaceFunctions"""
        terms = [(float(c), g, h) for c, g, h in terms]
        if not terms:
            raise ValidationError("a tensor test function needs at least one term")
        d1, d2 = terms[0][1].dim, terms[0][2].dim
        if any(g.dim != d1 or h.dim != d2 for _, g, h in terms):
            raise ValidationError("all tensor terms must share the same dimensions")

        def value(x, y):
            return sum(c * g.value(x) * h.value(y) for c, g, h in terms)

        def grad_x(x, y):
            return sum(c * g.gradient(x) * h.value(y)[..., None] for c, g, h in terms)

        def grad_y(x, y):
            return sum(c * g.value(x)[..., None] * h.gradient(y) for c, g, h in terms)

        def hessian_x(x, y):
            return sum(c * g.hessian(x) * h.value(y)[..., None, None] for c, g, h in terms)

        def hessian_y(x, y):
            return sum(c * g.value(x)[..., None, None] * h.hessian(y) for c, g, h in terms)

        return cls(
            d1,
            d2,
            value,
            grad_x,
            grad_y,
            hessian_x,
            hessian_y,
            support_radius=_tensor_support(terms),
            oscillation=_tensor_oscillation(terms),
            name=name,
        )

    @classmethod
    def linear(cls, x_weights, y_weights, offset=0.0):
        """f(x, y) = ⟨u, x⟩ + ⟨v, y⟩ + offset"""
        u = np.array(x_weights, dtype=float, ndmin=1)
        v = np.array(y_weights, dtype=float, ndmin=1)
        return cls.tensor(
            [
                (1.0, linear(u, offset), constant(1.0, v.shape[0])),
                (1.0, constant(1.0, u.shape[0]), linear(v)),
            ],
            name="linear",
        )

    @classmethod
    def from_config(cls, config, d1, d2, key_path=""):
        """Build a test function from its configuration block

        ``{"family": "tensor", "terms": [{"coef": c, "x": {...}, "y": {...}}, ...]}`` where
        the x and y blocks are SpaceFunction configurations, ``{"family": "linear",
        "params": {"x": [...], "y": [...]}}`` or a custom ``module_name``/``class_name``.
        """
        if not isinstance(config, dict):
            raise ValidationError("test function must be a mapping", key_path=key_path)
        family = config.get("family", "tensor")
        if family == "tensor":
            raw_terms = config.get("terms")
            if not isinstance(raw_terms, list) or not raw_terms:
                raise ValidationError("expected a non-empty list", key_path=f"{key_path}.terms")
            terms = []
            for i, term in enumerate(raw_terms):
                path = f"{key_path}.terms[{i}]"
                if not isinstance(term, dict):
                    raise ValidationError("term must be a mapping", key_path=path)
                x_fn = SpaceFunction.from_config(
                    term.get("x", {"family": "constant"}), d1, f"{path}.x"
                )
                y_fn = SpaceFunction.from_config(
                    term.get("y", {"family": "constant"}), d2, f"{path}.y"
                )
                terms.append((float(term.get("coef", 1.0)), x_fn, y_fn))
            test_fn = cls.tensor(terms, name=config.get("name", "tensor"))
        elif family == "linear":
            x_weights = fetch_param(config, "x", key_path, default=np.zeros(d1))
            y_weights = fetch_param(config, "y", key_path, default=np.zeros(d2))
            offset = float(fetch_param(config, "offset", key_path, default=0.0))
            test_fn = cls.linear(x_weights, y_weights, offset)
        elif family == "custom":
            test_fn = load_custom(config, key_path)
            if not isinstance(test_fn, TestFunction):
                raise ValidationError(
                    "custom class did not return a TestFunction", key_path=key_path
                )
        else:
            raise ValidationError(
                f"unknown test function family '{family}', expected one of {TEST_FAMILIES}",
                key_path=f"{key_path}.family",
            )

        if (test_fn.d1, test_fn.d2) != (d1, d2):
            raise ValidationError(
                f"test function acts on dimensions {(test_fn.d1, test_fn.d2)}, "
                f"expected {(d1, d2)}",
                key_path=key_path,
            )
        return test_fn


def _tensor_support(terms):
    radii = []
    for _, g, h in terms:
        if g.support_radius is None or h.support_radius is None:
            return None
        radii.append(math.hypot(g.support_radius, h.support_radius))
    return max(radii)


def _tensor_oscillation(terms):
    low, high = 0.0, 0.0
    for c, g, h in terms:
        if g.bounds is None or h.bounds is None:
            return None
        corners = [c * a * b for a in g.bounds for b in h.bounds]
        low += min(corners)
        high += max(corners)
    return high - low
