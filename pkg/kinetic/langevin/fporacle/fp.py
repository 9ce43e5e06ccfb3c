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
import warnings

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.fporacle.evolve import (
    DEFAULT_DT,
    CrankNicolson,
    GridCurve,
    check_grid_vector,
    propagate,
    step_count,
)

NEGATIVE_TOL = 1e-12
NORMALIZATION_TOL = 1e-8


def stationary_density(gs):
    """Discrete ρ = e^{-Φ-Ψ}/Z as a density with unit integral on the grid"""
    return gs.weights / gs.cell_area


def _masses(gs, density0):
    density = check_grid_vector(gs, density0, "density0")
    if np.any(density < 0):
        raise ValidationError("density0 must be nonnegative")
    mass = density.sum() * gs.cell_area
    if abs(mass - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"density0 must integrate to one on the grid, got {mass:.12g}")
    return density * gs.cell_area


def _check_sign(density):
    low = float(density.min())
    if low < -NEGATIVE_TOL:
        warnings.warn(
            f"Fokker-Planck density went negative ({low:.3e}); the scheme does not preserve "
            "positivity",
            RuntimeWarning,
        )


def fp_evolve(gs, density0, t, dt=DEFAULT_DT):
    """Evolve a probability density by the Fokker-Planck equation dual to L_h

    Cell masses m follow m' = L_hᵀm, which conserves ∑m since L_h·1 = 0 and leaves the
    discrete ρ fixed since wᵀL_h = 0. Returns a density with unit integral.
    """
    masses = _masses(gs, density0)
    steps = step_count(t, dt)
    if steps:
        masses = CrankNicolson(gs.L.T, dt).advance(masses, steps)
    density = masses / gs.cell_area
    _check_sign(density)
    return density


def fp_distance_curve(gs, density0, t_grid, dt=DEFAULT_DT):
    """Distance ‖u(t)/ρ - 1‖ in L²(μ) of the Fokker-Planck solution to equilibrium"""
    masses = _masses(gs, density0)
    t_grid, states = propagate(gs.L.T, masses, t_grid, dt)
    distances = []
    for m in states:
        _check_sign(m)
        ratio = m / gs.weights - 1.0
        distances.append(np.sqrt(gs.weights @ (ratio * ratio)))
    return GridCurve(t_grid, np.array(distances), label="distance")
