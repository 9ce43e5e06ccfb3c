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
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from kinetic.langevin.measures.quadrature import gauss_legendre

TABLE_SIZE = 4096
SLICE_COUNT = 256
SLICE_TABLE_SIZE = 512
TABLE_POINTS = 8
# rows of the (t, s) grid evaluated at once when integrating out a coordinate
CHUNK = 2048


def as_generator(seed):
    """Counter-based generator for an int seed or a SeedSequence"""
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class InverseCdfTable:
    """Monotone cubic inverse CDF of a one-dimensional density tabulated on a grid"""

    grid: np.ndarray
    cdf: np.ndarray

    @classmethod
    def build(cls, density, edges, size=TABLE_SIZE, points=TABLE_POINTS):
        """Tabulate the CDF of an unnormalized ``density`` over the panels ``edges``

        Each panel is cut into equal pieces so the table holds about ``size`` cells; the
        mass of every cell comes from its own Gauss-Legendre rule.
        """
        edges = np.asarray(edges, dtype=float)
        per_panel = max(1, math.ceil(size / (len(edges) - 1)))
        pieces = [np.linspace(a, b, per_panel + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
        grid = np.concatenate(pieces + [edges[-1:]])

        nodes, weights = gauss_legendre(grid, points)
        values = _chunked(density, nodes)
        mass = (weights * values).reshape(len(grid) - 1, points).sum(axis=1)
        cdf = np.concatenate([[0.0], np.cumsum(mass)])
        cdf /= cdf[-1]
        return cls(grid, cdf)

    @cached_property
    def _inverse(self):
        # strictly increasing knots; flat stretches keep their first abscissa
        cdf, index = np.unique(self.cdf, return_index=True)
        return PchipInterpolator(cdf, self.grid[index], extrapolate=False)

    def quantile(self, u):
        knots = self._inverse.x
        return self._inverse(np.clip(u, knots[0], knots[-1]))

    def cdf_at(self, t):
        return np.interp(t, self.grid, self.cdf)


def _chunked(density, points):
    return np.concatenate(
        [np.asarray(density(points[i : i + CHUNK])) for i in range(0, len(points), CHUNK)]
    )


@dataclass(frozen=True)
class ConditionalTable:
    """Two-dimensional sampler: marginal table in the first coordinate plus conditional
    tables of the second coordinate on quantile-spaced slices"""

    marginal: InverseCdfTable
    slices: np.ndarray
    conditionals: tuple

    @classmethod
    def build(cls, log_density, edges_t, edges_s, quadrature_points=TABLE_POINTS):
        """``log_density`` maps (n, 2) points to log of the unnormalized density"""
        s_nodes, s_weights = gauss_legendre(edges_s, quadrature_points)

        def marginal_density(t):
            pts = np.stack(np.broadcast_arrays(t[:, None], s_nodes[None, :]), axis=-1)
            return np.exp(log_density(pts.reshape(-1, 2))).reshape(len(t), -1) @ s_weights

        marginal = InverseCdfTable.build(marginal_density, edges_t)
        levels = (np.arange(SLICE_COUNT) + 0.5) / SLICE_COUNT
        slices = np.unique(marginal.quantile(levels))

        conditionals = []
        for t in slices:

            def conditional_density(s, t=t):
                pts = np.stack([np.full_like(s, t), s], axis=-1)
                return np.exp(log_density(pts))

            conditionals.append(
                InverseCdfTable.build(conditional_density, edges_s, size=SLICE_TABLE_SIZE)
            )
        return cls(marginal, slices, tuple(conditionals))

    def sample(self, uniforms):
        """Map (n, 2) uniforms to samples by quantile interpolation between slices"""
        t = self.marginal.quantile(uniforms[:, 0])
        upper = np.clip(np.searchsorted(self.slices, t), 1, len(self.slices) - 1)
        lower = upper - 1
        if len(self.slices) == 1:
            upper = lower = np.zeros_like(upper)
            frac = np.zeros_like(t)
        else:
            span = self.slices[upper] - self.slices[lower]
            frac = np.clip((t - self.slices[lower]) / span, 0.0, 1.0)

        below = np.empty_like(t)
        above = np.empty_like(t)
        for j in np.unique(lower):
            mask = lower == j
            below[mask] = self.conditionals[j].quantile(uniforms[mask, 1])
        for j in np.unique(upper):
            mask = upper == j
            above[mask] = self.conditionals[j].quantile(uniforms[mask, 1])
        s = (1.0 - frac) * below + frac * above
        return np.stack([t, s], axis=-1)
