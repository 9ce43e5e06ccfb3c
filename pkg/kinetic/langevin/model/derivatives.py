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
from dataclasses import dataclass
from typing import Optional

import numpy as np

FD_STEP = 1e-5
FD_RTOL = 1e-6


@dataclass(frozen=True)
class DerivativeCheck:
    """Outcome of a central finite-difference comparison"""

    max_error: float
    witness: Optional[np.ndarray]
    rtol: float = FD_RTOL

    @property
    def passed(self):
        return bool(self.max_error <= self.rtol)


def central_difference(fn, points, step=FD_STEP):
    """Central differences of ``fn`` along each axis, stacked on a new last axis

    ``fn`` maps (n, d) to (n, *shape); the result has shape (n, *shape, d).
    """
    points = np.asarray(points, dtype=float)
    dim = points.shape[-1]
    h = step * np.maximum(1.0, np.abs(points))
    columns = []
    for k in range(dim):
        shift = np.zeros_like(points)
        shift[:, k] = h[:, k]
        diff = np.asarray(fn(points + shift)) - np.asarray(fn(points - shift))
        scale = (2.0 * h[:, k]).reshape((-1,) + (1,) * (diff.ndim - 1))
        columns.append(diff / scale)
    return np.stack(columns, axis=-1)


def _compare(analytic, approx, points, rtol):
    analytic = np.asarray(analytic, dtype=float)
    approx = np.asarray(approx, dtype=float)
    axes = tuple(range(1, analytic.ndim))
    scale = np.maximum(1.0, np.abs(analytic).max(axis=axes))
    error = np.abs(analytic - approx).max(axis=axes) / scale
    if not np.all(np.isfinite(error)):
        worst = int(np.argmax(~np.isfinite(error)))
        return DerivativeCheck(np.inf, points[worst], rtol)
    worst = int(np.argmax(error))
    return DerivativeCheck(float(error[worst]), points[worst], rtol)


def check_gradient(value, gradient, points, rtol=FD_RTOL):
    """Compare an analytic gradient with central differences of ``value``"""
    points = np.asarray(points, dtype=float)
    return _compare(gradient(points), central_difference(value, points), points, rtol)


def check_hessian(gradient, hessian, points, rtol=FD_RTOL):
    """Compare an analytic Hessian with central differences of ``gradient``"""
    points = np.asarray(points, dtype=float)
    return _compare(hessian(points), central_difference(gradient, points), points, rtol)


def check_potential(potential, points, rtol=FD_RTOL):
    """Gradient and Hessian consistency of a PotentialSpec (or SpaceFunction)"""
    return (
        check_gradient(potential.value, potential.gradient, points, rtol),
        check_hessian(potential.gradient, potential.hessian, points, rtol),
    )


def check_test_function(f, x_points, y_points, rtol=FD_RTOL):
    """Worst finite-difference discrepancy over all derivative callbacks of a TestFunction

    ``x_points`` and ``y_points`` are paired row by row.
    """
    x_points = np.asarray(x_points, dtype=float)
    y_points = np.asarray(y_points, dtype=float)
    checks = [
        check_gradient(
            lambda x: f.value(x, y_points), lambda x: f.grad_x(x, y_points), x_points, rtol
        ),
        check_gradient(
            lambda y: f.value(x_points, y), lambda y: f.grad_y(x_points, y), y_points, rtol
        ),
        check_hessian(
            lambda y: f.grad_y(x_points, y), lambda y: f.hessian_y(x_points, y), y_points, rtol
        ),
    ]
    if f.hessian_x is not None:
        checks.append(
            check_hessian(
                lambda x: f.grad_x(x, y_points), lambda x: f.hessian_x(x, y_points), x_points, rtol
            )
        )
    return max(checks, key=lambda c: c.max_error)


def third_derivatives(potential, points, step=FD_STEP):
    """∂_i∂_j∂_k V by central differences of the analytic Hessian, shape (n, d, d, d)"""
    return central_difference(potential.hessian, points, step)
