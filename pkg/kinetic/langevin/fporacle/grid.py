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
from scipy import sparse as sp
from scipy.sparse import linalg as spla

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.gibbs import GibbsMeasure

LOG = logging.getLogger("kinetic-langevin")

DEFAULT_CELLS = 257
MASS_TOL = 1e-10
# eigenvalues below this modulus count as the kernel of L_h
ZERO_EIGENVALUE = 1e-6


@dataclass(frozen=True)
class GridSemigroup:
    """Cell-centred discretization of L on [-R, R]² built from its bilinear form

    ``weights`` is the discrete μ (summing to one) over the flattened cells, x-major. With
    W = diag(weights), W·S is symmetric negative semidefinite and W·A is skew-symmetric, so
    L_h = S - A satisfies L_h·1 = 0 and wᵀL_h = 0 up to rounding.
    """

    radius: float
    n_x: int
    n_y: int
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    S: sp.csr_matrix
    A: sp.csr_matrix

    @property
    def L(self):
        return (self.S - self.A).tocsr()

    @property
    def size(self):
        return self.n_x * self.n_y

    @property
    def cell_area(self):
        return (2.0 * self.radius / self.n_x) * (2.0 * self.radius / self.n_y)

    def mesh(self):
        """Cell centres as two (n_x * n_y,) arrays in the flattened order"""
        xx, yy = np.meshgrid(self.x, self.y, indexing="ij")
        return xx.ravel(), yy.ravel()

    def grid_vector(self, fn):
        """Evaluate ``fn(x, y)``, with x and y of shape (n, 1), on the cell centres"""
        xx, yy = self.mesh()
        values = np.asarray(fn(xx[:, None], yy[:, None]), dtype=float)
        return np.broadcast_to(values.ravel(), (self.size,)).copy()

    def mean(self, u):
        return float(self.weights @ u)

    def variance(self, u):
        centered = u - self.mean(u)
        return float(self.weights @ (centered * centered))

    def inner(self, u, v):
        return float(self.weights @ (u * v))

    def identities(self):
        """Largest entries of L_h·1, wᵀL_h, WS - (WS)ᵀ and WA + (WA)ᵀ"""
        ones = np.ones(self.size)
        weighted_s = sp.diags(self.weights) @ self.S
        weighted_a = sp.diags(self.weights) @ self.A
        return {
            "kernel": float(np.max(np.abs(self.L @ ones))),
            "invariance": float(np.max(np.abs(self.L.T @ self.weights))),
            "symmetry": _max_abs(weighted_s - weighted_s.T),
            "skewness": _max_abs(weighted_a + weighted_a.T),
        }


def _max_abs(matrix):
    matrix = sp.csr_matrix(matrix)
    return float(np.max(np.abs(matrix.data))) if matrix.nnz else 0.0


def _difference(n, step):
    # (n - 1) x n forward differences
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n)) / step


def _average(n):
    return sp.diags([np.full(n - 1, 0.5), np.full(n - 1, 0.5)], [0, 1], shape=(n - 1, n))


def mass_deficit(potential, radius, measure=None):
    """μ-mass of a one-dimensional Gibbs measure outside [-R, R]"""
    measure = measure or GibbsMeasure.from_potential(potential)
    tail = potential.tail_bound(radius)
    if tail is None:
        outside = np.abs(measure.nodes[:, 0]) > radius
        return float(measure.weights[outside].sum())
    return float(tail) / measure.Z


def default_radius(model):
    mu1 = GibbsMeasure.from_potential(model.phi)
    mu2 = GibbsMeasure.from_potential(model.psi)
    return max(mu1.radius, mu2.radius)


def build_grid_operator(model, R=None, n_x=DEFAULT_CELLS, n_y=DEFAULT_CELLS):
    """Assemble S_h and A_h from the form (Lf, g)_μ = ∫ Q(f_x g_y - f_y g_x) - Σ f_y g_y dμ

    The symmetric part uses y-edge differences between neighbouring cells, so no flux leaves
    the truncated box; the antisymmetric part uses centred differences at the cell corners.
    """
    if model.d1 != 1 or model.d2 != 1:
        raise ValidationError(
            f"the grid oracle needs d1 = d2 = 1, got ({model.d1}, {model.d2})", key_path="dims"
        )
    for label, n in (("n_x", n_x), ("n_y", n_y)):
        if not isinstance(n, (int, np.integer)) or n < 3:
            raise ValidationError(f"need at least 3 cells, got {n}", key_path=label)
    R = default_radius(model) if R is None else float(R)
    if not R > 0:
        raise ValidationError(f"truncation radius must be positive, got {R}", key_path="R")

    deficit = mass_deficit(model.phi, R) + mass_deficit(model.psi, R)
    if deficit > MASS_TOL:
        raise ValidationError(
            f"truncation radius {R:g} leaves μ-mass {deficit:.3e} outside the box, "
            f"above {MASS_TOL:g}",
            key_path="R",
        )

    dx, dy = 2.0 * R / n_x, 2.0 * R / n_y
    x = -R + (np.arange(n_x) + 0.5) * dx
    y = -R + (np.arange(n_y) + 0.5) * dy
    phi = np.asarray(model.phi.value(x[:, None]), dtype=float)
    psi = np.asarray(model.psi.value(y[:, None]), dtype=float)
    log_w = -(phi[:, None] + psi[None, :])
    log_w = (log_w - log_w.max()).ravel()
    raw = np.exp(log_w)
    total = math.fsum(raw)
    weights = raw / total
    if np.any(weights <= 0):
        raise NumericalError("grid weights underflow; reduce the truncation radius")

    # symmetric part, one edge between each pair of y-neighbours
    d_y = sp.kron(sp.identity(n_x), _difference(n_y, dy), format="csr")
    lower = sp.kron(sp.identity(n_x), sp.eye(n_y - 1, n_y), format="csr")
    upper = sp.kron(sp.identity(n_x), sp.eye(n_y - 1, n_y, k=1), format="csr")
    edge_weight = np.exp(0.5 * (lower @ log_w + upper @ log_w)) / total
    y_mid = 0.5 * (y[:-1] + y[1:])
    sigma_mid = np.asarray(model.sigma.matrix(y_mid[:, None]), dtype=float)[:, 0, 0]
    stiffness = sp.diags(edge_weight * np.tile(sigma_mid, n_x))
    inv_w = sp.diags(1.0 / weights)
    S = -(inv_w @ (d_y.T @ stiffness @ d_y))

    # antisymmetric part on the (n_x - 1) x (n_y - 1) corners
    dx_c = sp.kron(_difference(n_x, dx), _average(n_y), format="csr")
    dy_c = sp.kron(_average(n_x), _difference(n_y, dy), format="csr")
    corner_weight = sp.diags(sp.kron(_average(n_x), _average(n_y), format="csr") @ weights)
    q = float(model.Q[0, 0])
    B = q * (dx_c.T @ corner_weight @ dy_c - dy_c.T @ corner_weight @ dx_c)
    A = inv_w @ B

    LOG.info("Assembled %dx%d grid operator on [-%g, %g]²", n_x, n_y, R, R)
    return GridSemigroup(R, n_x, n_y, x, y, weights, S.tocsr(), A.tocsr())


def spectral_abscissa(gs, k=6, shift=0.01):
    """Largest real part among the nonzero eigenvalues of L_h closest to the origin"""
    try:
        values = spla.eigs(gs.L.tocsc(), k=k, sigma=shift, which="LM", return_eigenvectors=False)
    except (spla.ArpackNoConvergence, RuntimeError) as exc:
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc
    nonzero = values[np.abs(values) > ZERO_EIGENVALUE]
    if len(nonzero) == 0:
        raise NumericalError(f"no nonzero eigenvalue among the {k} closest to {shift}")
    return float(np.max(nonzero.real))
