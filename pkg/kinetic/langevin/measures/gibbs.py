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
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np
import pandas as pd
from scipy import stats

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.quadrature import (
    PANEL_POINTS,
    TensorRule,
    adaptive_edges,
    initial_edges,
)
from kinetic.langevin.measures.sampling import ConditionalTable, InverseCdfTable, as_generator

LOG = logging.getLogger("kinetic-langevin")

DEFAULT_TAIL_TOL = 1e-10
MAX_DOUBLINGS = 42
MAX_DIM = 3
# per-axis points of the tensor rule, by dimension
TENSOR_POINTS = {1: PANEL_POINTS, 2: 8, 3: 4}
REFINE_RTOL = 1e-9
PANEL_RTOL = {1: 1e-13, 2: 1e-11, 3: 1e-8}
MAX_NODES = 4_000_000
MAX_REFINEMENTS = 3


@dataclass(frozen=True)
class Quadrature:
    """Nodes and Lebesgue weights of a tensor Gauss-Legendre rule on [-R, R]^d"""

    nodes: np.ndarray
    weights: np.ndarray
    edges: tuple

    @property
    def size(self):
        return len(self.weights)


def _log_integral(potential, nodes, weights):
    values = np.asarray(potential.value(nodes), dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"potential is not finite on {np.sum(~np.isfinite(values))} nodes")
    shift = values.min()
    total = float(np.dot(weights, np.exp(shift - values)))
    return math.log(total) - shift, values


def _center(potential):
    if potential.gaussian:
        matrix, shift = potential.params["matrix"], potential.params["shift"]
        return np.linalg.solve(matrix, shift)
    return np.zeros(potential.dim)


def _coarse_rule(potential, radius, points):
    center = _center(potential)
    edges = tuple(initial_edges(radius, c) for c in center)
    nodes, weights = TensorRule(edges, points).nodes_and_weights()
    return nodes, weights


def _adaptive_rule(potential, radius, points):
    """Per-axis adaptive panels along the axis profiles through the mode, then global
    refinement until the tensor rule is stable"""
    center = _center(potential)
    dim = potential.dim
    peak = float(potential.value(center[None, :])[0])
    edges = []
    for axis in range(potential.dim):

        def profile(t, axis=axis):
            pts = np.repeat(center[None, :], len(t), axis=0)
            pts[:, axis] = t
            return np.exp(peak - potential.value(pts))

        start = initial_edges(radius, center[axis])
        edges.append(adaptive_edges(profile, start, rtol=PANEL_RTOL[dim], points=points))
    rule = TensorRule(tuple(edges), points)
    nodes, weights = rule.nodes_and_weights()
    log_z, _ = _log_integral(potential, nodes, weights)
    if potential.dim == 1:
        return rule, log_z

    for _ in range(MAX_REFINEMENTS):
        finer = rule.refined()
        if finer.size > MAX_NODES:
            LOG.warning(
                "Tensor quadrature kept at %d nodes, refinement would exceed %d",
                rule.size,
                MAX_NODES,
            )
            break
        fine_nodes, fine_weights = finer.nodes_and_weights()
        fine_log_z, _ = _log_integral(potential, fine_nodes, fine_weights)
        change = abs(math.expm1(fine_log_z - log_z))
        rule, log_z = finer, fine_log_z
        LOG.debug("Tensor refinement to %d nodes changed Z by %.3e", rule.size, change)
        if change < REFINE_RTOL:
            break
    return rule, log_z


def normalize(potential, d=None, tail_tol=DEFAULT_TAIL_TOL):
    """Z(V) = ∫ e^{-V(x)} dx with a truncation radius and the quadrature that produced it

    The radius doubles from 1 until the analytic tail bound of the family, relative to Z,
    drops below ``tail_tol``. Potentials without an analytic bound use the mass added by the
    last doubling as the tail estimate.

    Returns
    -------
    (Z, R, Quadrature)
    """
    z, radius, quadrature, _ = _normalize(potential, d, tail_tol)
    return z, radius, quadrature


def _normalize(potential, d, tail_tol):
    dim = potential.dim
    if d is not None and d != dim:
        raise ValidationError(f"potential has dimension {dim}, requested {d}")
    if dim > MAX_DIM:
        raise ValidationError(f"quadrature supports dimensions up to {MAX_DIM}, got {dim}")
    if not potential.integrable:
        raise ValidationError("custom potential is not asserted to be integrable")
    points = TENSOR_POINTS[dim]

    radius = 1.0
    previous = None
    tail = math.inf
    for _ in range(MAX_DOUBLINGS):
        nodes, weights = _coarse_rule(potential, radius, points)
        log_z, _ = _log_integral(potential, nodes, weights)
        bound = potential.tail_bound(radius)
        if bound is None:
            if previous is not None:
                tail = abs(math.expm1(previous - log_z))
        elif math.isinf(bound):
            raise NumericalError(
                "not integrable at working precision: the tail of e^{-V} is not summable"
            )
        else:
            tail = bound * math.exp(-log_z) if bound > 0 else 0.0
        LOG.debug("Truncation radius %g: relative tail estimate %.3e", radius, tail)
        if tail < tail_tol:
            break
        previous = log_z
        radius *= 2.0
    else:
        raise NumericalError(
            f"not integrable at working precision: relative tail mass {tail:.3e} "
            f"at truncation radius {radius:g}"
        )

    rule, log_z = _adaptive_rule(potential, radius, points)
    nodes, weights = rule.nodes_and_weights()
    exact = potential.exact_normalization()
    if exact is not None:
        log_z = math.log(exact)
    LOG.debug("Normalized %s potential: R=%g, %d nodes", potential.family, radius, len(nodes))
    return math.exp(log_z), radius, Quadrature(nodes, weights, rule.edges), (log_z, tail)


@dataclass(frozen=True)
class GibbsMeasure:
    """Probability measure Z(V)^{-1} e^{-V(x)} dx with its quadrature

    ``weights`` are probability weights summing to one on ``nodes``.
    """

    potential: Any
    dim: int
    Z: float
    log_z: float
    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    quadrature: Quadrature = field(repr=False)
    tail_mass: float = 0.0

    @classmethod
    def from_potential(cls, potential, tail_tol=DEFAULT_TAIL_TOL):
        z, radius, quadrature, (log_z, tail) = _normalize(potential, None, tail_tol)
        values = np.asarray(potential.value(quadrature.nodes), dtype=float)
        density = quadrature.weights * np.exp(values.min() - values)
        weights = density / density.sum()
        weights.setflags(write=False)
        return cls(
            potential,
            potential.dim,
            z,
            log_z,
            radius,
            quadrature.nodes,
            weights,
            quadrature,
            tail_mass=tail,
        )

    def moment(self, g):
        """∫ g dμ for a vectorized ``g`` mapping (n, d) nodes to (n, ...) values"""
        with np.errstate(over="ignore", invalid="ignore"):
            values = np.asarray(g(self.nodes), dtype=float)
        if values.shape[:1] != (len(self.weights),):
            values = np.broadcast_to(values, (len(self.weights),) + values.shape[1:])
        if not np.all(np.isfinite(values)):
            raise NumericalError("integrand overflows on quadrature nodes")
        result = np.tensordot(self.weights, values, axes=([0], [0]))
        return float(result) if np.ndim(result) == 0 else result

    def mean(self):
        return self.moment(lambda z: z)

    def covariance(self):
        centered = self.mean()
        return self.moment(lambda z: (z - centered)[:, :, None] * (z - centered)[:, None, :])

    @cached_property
    def _sampler(self):
        edges = self.quadrature.edges
        if self.dim == 1:
            return InverseCdfTable.build(self._density_1d, edges[0])
        if self.dim == 2:
            return ConditionalTable.build(self._log_density, edges[0], edges[1])
        raise ValidationError(
            f"table sampling supports d <= 2, got d={self.dim}; use the quadratic "
            "(Gaussian) family for exact sampling in higher dimensions"
        )

    @cached_property
    def _shift(self):
        return float(np.min(self.potential.value(self.nodes)))

    def _log_density(self, points):
        return self._shift - self.potential.value(points)

    def _density_1d(self, t):
        return np.exp(self._log_density(t[:, None]))

    def sample(self, n, seed):
        """``n`` draws from the measure, a deterministic function of ``seed``

        Gaussian families are sampled exactly, one- and two-dimensional measures through
        inverse-CDF tables built from the quadrature panels.
        """
        if n < 0:
            raise ValidationError(f"sample size must be nonnegative, got {n}")
        if n == 0:
            return np.empty((0, self.dim))
        rng = as_generator(seed)
        if self.potential.gaussian:
            matrix, shift = self.potential.params["matrix"], self.potential.params["shift"]
            z = rng.standard_normal((n, self.dim))
            return np.linalg.solve(matrix, (z + shift).T).T
        sampler = self._sampler
        uniforms = rng.random((n, self.dim))
        if self.dim == 1:
            return sampler.quantile(uniforms[:, 0])[:, None]
        return sampler.sample(uniforms)

    def cdf(self, t):
        """Distribution function of a one-dimensional measure"""
        if self.dim != 1:
            raise ValidationError("cdf is only defined for one-dimensional measures")
        if self.potential.gaussian:
            matrix, shift = self.potential.params["matrix"], self.potential.params["shift"]
            scale = 1.0 / abs(matrix[0, 0])
            return stats.norm.cdf(np.asarray(t), loc=shift[0] / matrix[0, 0], scale=scale)
        return self._sampler.cdf_at(t)

    def quadrature_table(self):
        """Nodes with their Lebesgue and probability weights as a DataFrame"""
        columns = {f"x{k}": self.nodes[:, k] for k in range(self.dim)}
        columns["lebesgue_weight"] = self.quadrature.weights
        columns["probability_weight"] = self.weights
        return pd.DataFrame(columns)

    def dump_quadrature(self, path):
        self.quadrature_table().to_csv(path, index=False, float_format="%.17g")


def quadrature_table(measure):
    return measure.quadrature_table()


@dataclass(frozen=True)
class ProductMeasure:
    """μ = μ₁ ⊗ μ₂ with the tensor product of the factor quadratures"""

    mu1: GibbsMeasure
    mu2: GibbsMeasure

    # x rows per chunk so a chunk of the product grid stays small
    max_chunk_nodes = 2_000_000

    @classmethod
    def from_potentials(cls, phi, psi, tail_tol=DEFAULT_TAIL_TOL):
        return cls(
            GibbsMeasure.from_potential(phi, tail_tol), GibbsMeasure.from_potential(psi, tail_tol)
        )

    @property
    def dims(self):
        return self.mu1.dim, self.mu2.dim

    def integrate(self, fn):
        """∫ fn(x, y) μ(dx, dy) for ``fn`` broadcasting over (n1, 1, d1) and (1, n2, d2)"""
        y = self.mu2.nodes[None, :, :]
        rows = max(1, self.max_chunk_nodes // len(self.mu2.weights))
        total = 0.0
        for start in range(0, len(self.mu1.weights), rows):
            x = self.mu1.nodes[start : start + rows, None, :]
            values = np.asarray(fn(x, y), dtype=float)
            values = np.broadcast_to(values, (x.shape[0], y.shape[1]))
            if not np.all(np.isfinite(values)):
                raise NumericalError("integrand overflows on product quadrature nodes")
            total += self.mu1.weights[start : start + rows] @ values @ self.mu2.weights
        return float(total)

    def inner(self, f, g):
        """(f, g)_μ for callables of (x, y)"""
        return self.integrate(lambda x, y: f(x, y) * g(x, y))
