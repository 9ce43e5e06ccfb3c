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
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

LOG = logging.getLogger("kinetic-langevin")

PANEL_POINTS = 16
PANEL_RTOL = 1e-13
MAX_SPLITS = 4000


@lru_cache(maxsize=None)
def _reference_rule(points):
    nodes, weights = leggauss(points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(edges, points=PANEL_POINTS):
    """Composite Gauss-Legendre nodes and weights on consecutive panels ``edges``"""
    edges = np.asarray(edges, dtype=float)
    ref_nodes, ref_weights = _reference_rule(points)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (left + half * (ref_nodes + 1.0)).ravel()
    weights = (half * ref_weights).ravel()
    return nodes, weights


def initial_edges(radius, center=0.0):
    """Panels on [-radius, radius] that widen geometrically away from ``center``"""
    offsets = [0.0, 0.25, 0.5]
    step = 1.0
    while step < 2.0 * radius:
        offsets.append(step)
        step *= 2.0
    offsets = np.asarray(offsets)
    edges = np.concatenate([center - offsets, center + offsets, [-radius, radius]])
    edges = np.unique(np.clip(edges, -radius, radius))
    return edges


def refine_edges(edges):
    """Insert every panel midpoint"""
    edges = np.asarray(edges, dtype=float)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return np.sort(np.concatenate([edges, mids]))


def adaptive_edges(integrand, edges, rtol=PANEL_RTOL, points=PANEL_POINTS):
    """Bisect panels until a panel rule and its two halves agree

    ``integrand`` is a vectorized nonnegative function of one variable. A panel is accepted
    once the two estimates differ by less than ``rtol`` times the total integral.
    """
    edges = list(np.asarray(edges, dtype=float))
    nodes, weights = gauss_legendre(edges, points)
    total = abs(float(np.dot(weights, integrand(nodes))))
    tolerance = rtol * max(total, np.finfo(float).tiny)

    accepted = []
    pending = list(zip(edges[:-1], edges[1:]))
    splits = 0
    while pending:
        a, b = pending.pop()
        m = 0.5 * (a + b)
        coarse_nodes, coarse_weights = gauss_legendre([a, b], points)
        fine_nodes, fine_weights = gauss_legendre([a, m, b], points)
        coarse = np.dot(coarse_weights, integrand(coarse_nodes))
        fine = np.dot(fine_weights, integrand(fine_nodes))
        if abs(coarse - fine) <= tolerance or splits >= MAX_SPLITS or m in (a, b):
            accepted.append((a, b))
        else:
            pending.extend([(a, m), (m, b)])
            splits += 1
    if splits >= MAX_SPLITS:
        LOG.warning("Adaptive quadrature stopped after %d panel splits", splits)

    LOG.debug("Adaptive quadrature finished with %d panels (%d splits)", len(accepted), splits)
    out = sorted({a for a, _ in accepted} | {b for _, b in accepted})
    return np.asarray(out)


@dataclass(frozen=True)
class TensorRule:
    """Tensor product of per-axis composite Gauss-Legendre rules"""

    edges: tuple
    points: int = PANEL_POINTS

    @property
    def dim(self):
        return len(self.edges)

    def axis_rule(self, axis):
        return gauss_legendre(self.edges[axis], self.points)

    def nodes_and_weights(self):
        rules = [self.axis_rule(k) for k in range(self.dim)]
        grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
        weight_grids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        weights = np.prod(np.stack([w.ravel() for w in weight_grids], axis=-1), axis=-1)
        return nodes, weights

    def refined(self):
        return TensorRule(tuple(refine_edges(e) for e in self.edges), self.points)

    @property
    def size(self):
        return int(np.prod([(len(e) - 1) * self.points for e in self.edges]))
