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

import numpy as np
import pandas as pd
from scipy import sparse as sp
from scipy.sparse import linalg as spla

from kinetic.langevin.exceptions import NumericalError, ValidationError

LOG = logging.getLogger("kinetic-langevin")

DEFAULT_DT = 1e-3
STEP_TOL = 1e-9


@dataclass(frozen=True)
class GridCurve:
    """A deterministic curve on a time grid, e.g. Var_w(u(t)) or a distance to equilibrium

    Exposes ``v_hat`` and a zero ``se`` so it can be audited like Monte Carlo data.
    """

    t: np.ndarray
    values: np.ndarray
    label: str = "variance"

    @property
    def v_hat(self):
        return self.values

    @property
    def se(self):
        return np.zeros_like(self.values)

    def to_frame(self):
        return pd.DataFrame({"t": self.t, self.label: self.values})


class CrankNicolson:
    """(I - dt/2 M) u' = (I + dt/2 M) u with the left factor LU-decomposed once"""

    def __init__(self, operator, dt):
        if not dt > 0:
            raise ValidationError(f"time step must be positive, got {dt}", key_path="dt")
        identity = sp.identity(operator.shape[0], format="csc")
        half = 0.5 * dt * sp.csc_matrix(operator)
        self.dt = dt
        self._explicit = (identity + half).tocsr()
        try:
            self._solver = spla.splu((identity - half).tocsc())
        except RuntimeError as exc:
            raise NumericalError(f"Crank-Nicolson factorization failed: {exc}") from exc

    def step(self, u):
        u = self._solver.solve(self._explicit @ u)
        if not np.all(np.isfinite(u)):
            raise NumericalError("Crank-Nicolson step produced non-finite values")
        return u

    def advance(self, u, steps):
        for _ in range(steps):
            u = self.step(u)
        return u


def step_count(t, dt):
    """Number of steps of size ``dt`` reaching ``t``, which must be a multiple of it"""
    t = float(t)
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    n = round(t / dt)
    if abs(n * dt - t) > STEP_TOL * max(1.0, t):
        raise ValidationError(f"time {t} is not a multiple of dt={dt}")
    return int(n)


def check_grid_vector(gs, u, name):
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (gs.size,):
        raise ValidationError(f"{name} must have {gs.size} entries, got {u.shape}")
    return u


def _check_times(t_grid, dt):
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if len(t_grid) == 0 or np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be nonempty, nonnegative and strictly increasing")
    return t_grid, [step_count(t, dt) for t in t_grid]


def evolve(gs, f0, t, dt=DEFAULT_DT):
    """u(t) for u' = L_h u, u(0) = f0"""
    u = check_grid_vector(gs, f0, "f0")
    steps = step_count(t, dt)
    if steps == 0:
        return u.copy()
    return CrankNicolson(gs.L, dt).advance(u, steps)


def propagate(operator, u0, t_grid, dt):
    """States of u' = operator·u at every time of ``t_grid``"""
    t_grid, steps = _check_times(t_grid, dt)
    stepper = CrankNicolson(operator, dt)
    states, u, done = [], u0, 0
    for target in steps:
        u = stepper.advance(u, target - done)
        done = target
        states.append(u)
    return t_grid, states


def decay_curve(gs, f, t_grid, dt=DEFAULT_DT):
    """Var_w(u(t)) of the grid semigroup started from ``f`` at each time of ``t_grid``"""
    u0 = check_grid_vector(gs, f, "f")
    t_grid, states = propagate(gs.L, u0, t_grid, dt)
    variances = np.array([gs.variance(u) for u in states])
    LOG.debug("Grid variance decay from %.6g to %.6g", variances[0], variances[-1])
    return GridCurve(t_grid, variances)
