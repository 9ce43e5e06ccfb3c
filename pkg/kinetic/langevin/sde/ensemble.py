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
import time
from dataclasses import dataclass

import dask
import numpy as np
import pandas as pd
from tqdm import tqdm

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.gibbs import ProductMeasure
from kinetic.langevin.model.operators import apply_L, carre_du_champ
from kinetic.langevin.sde.integrator import IntegratorConfig, em_step
from kinetic.langevin.sde.streams import IncrementSource, start_sequence

LOG = logging.getLogger("kinetic-langevin")


@dataclass(frozen=True)
class EnsembleResult:
    """States at the recorded steps and running left Riemann sums of the integrands

    ``states`` has shape (n_record, n_paths, d1 + d2) and ``integrals`` has shape
    (n_record, n_paths, n_integrands).
    """

    steps: tuple
    states: np.ndarray
    integrals: np.ndarray

    def split(self, d1):
        return self.states[..., :d1], self.states[..., d1:]


@dataclass(frozen=True)
class DecayEstimate:
    """Pair-coupled estimates of μ((T_t f)²) - μ(f)² on a time grid"""

    t: np.ndarray
    v_hat: np.ndarray
    se: np.ndarray
    n_outer: int
    n_inner: int
    seed: int
    h: float
    mean_f: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.se)):
            raise NumericalError("standard errors of the decay estimate are not finite")

    def to_frame(self):
        return pd.DataFrame(
            {
                "t": self.t,
                "v_hat": self.v_hat,
                "se": self.se,
                "n_outer": self.n_outer,
                "h": self.h,
                "seed": self.seed,
            }
        )


def mean_and_se(values):
    """Sample mean and its standard error with compensated sums, in index order"""
    values = np.asarray(values, dtype=float).ravel()
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, float("nan")
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(variance / n)


def _record_steps(config, t_grid):
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValidationError("t_grid must be a nonempty one-dimensional sequence")
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be nonnegative and strictly increasing", "t_grid")
    return t_grid, tuple(config.steps(t) for t in t_grid)


def _simulate_block(model, config, starts, indices, seed, pair, steps, integrands):
    d1 = model.d1
    x, y = starts[:, :d1].copy(), starts[:, d1:].copy()
    n_paths = len(starts)
    states = np.empty((len(steps), n_paths, d1 + model.d2))
    integrals = np.zeros((len(steps), n_paths, len(integrands)))
    running = np.zeros((n_paths, len(integrands)))
    source = IncrementSource(seed, indices, model.d2, pair=pair)

    slot = 0
    final = steps[-1]
    for step in range(final + 1):
        while slot < len(steps) and steps[slot] == step:
            states[slot, :, :d1] = x
            states[slot, :, d1:] = y
            integrals[slot] = running
            slot += 1
        if step == final:
            break
        if integrands:
            running += config.h * np.stack([g(x, y) for g in integrands], axis=-1)
        x, y = em_step(model, (x, y), config.h, source.next(), config.factorization)
        with np.errstate(invalid="ignore"):
            size = max(np.abs(x).max(initial=0.0), np.abs(y).max(initial=0.0))
        if not size <= config.overflow_guard:
            raise NumericalError(
                f"path blow-up after {step + 1} steps: |state| exceeds the overflow guard "
                f"{config.overflow_guard:g}"
            )
    return states, integrals


def run_ensemble(model, config, starts, seed, t_grid, pair=0, integrands=()):
    """Advance one trajectory per row of ``starts`` and record it on ``t_grid``

    Trajectory i draws its increments from the stream keyed by (seed, i, pair). Blocks of
    ``config.block_size`` trajectories run through dask threads when ``config.workers > 1``.
    """
    config = config or IntegratorConfig()
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    if starts.shape[-1] != model.d1 + model.d2:
        raise ValidationError(
            f"starting points must have {model.d1 + model.d2} coordinates, got {starts.shape}"
        )
    _, steps = _record_steps(config, t_grid)
    config.check_stability(model)

    blocks = []
    for begin in range(0, len(starts), config.block_size):
        indices = range(begin, min(begin + config.block_size, len(starts)))
        blocks.append((starts[begin : indices.stop], indices))

    began = time.perf_counter()
    if config.workers > 1:
        tasks = [
            dask.delayed(_simulate_block)(
                model, config, block, indices, seed, pair, steps, tuple(integrands)
            )
            for block, indices in blocks
        ]
        results = dask.compute(*tasks, scheduler="threads", num_workers=config.workers)
    else:
        results = [
            _simulate_block(model, config, block, indices, seed, pair, steps, tuple(integrands))
            for block, indices in tqdm(
                blocks, desc="trajectory blocks", disable=not config.progress
            )
        ]
    LOG.debug(
        "Simulated %d paths over %d steps in %.2fs",
        len(starts),
        steps[-1],
        time.perf_counter() - began,
    )
    if not results:
        shape = (len(steps), 0)
        return EnsembleResult(
            steps, np.empty(shape + (starts.shape[-1],)), np.empty(shape + (len(integrands),))
        )
    states = np.concatenate([r[0] for r in results], axis=1)
    integrals = np.concatenate([r[1] for r in results], axis=1)
    return EnsembleResult(steps, states, integrals)


def _start_point(model, start):
    if isinstance(start, (tuple, list)) and len(start) == 2:
        x, y = (np.atleast_1d(np.asarray(part, dtype=float)) for part in start)
        point = np.concatenate([x, y])
    else:
        point = np.asarray(start, dtype=float).ravel()
    if point.shape != (model.d1 + model.d2,):
        raise ValidationError(
            f"start must have {model.d1} + {model.d2} coordinates, got {point.shape}"
        )
    return point


def sample_starts(model, n, seed, product=None):
    """n independent draws from μ = μ₁ ⊗ μ₂"""
    product = product or ProductMeasure.from_potentials(model.phi, model.psi)
    x = product.mu1.sample(n, start_sequence(seed, 1))
    y = product.mu2.sample(n, start_sequence(seed, 2))
    return np.hstack([x, y])


def estimate_transition(model, f, start, t, M, seed, config=None):
    """Monte Carlo estimate of p_t f(x, y) = E_{(x,y)}[f(X_t, Y_t)] over ``M`` paths"""
    config = config or IntegratorConfig()
    if M < 2:
        raise ValidationError(f"need at least two paths, got M={M}", key_path="M")
    point = _start_point(model, start)
    steps = config.steps(t)
    x0, y0 = point[None, : model.d1], point[None, model.d1 :]
    if steps == 0:
        return float(np.asarray(f.value(x0, y0)).ravel()[0]), 0.0
    result = run_ensemble(model, config, np.tile(point, (M, 1)), seed, [t])
    x, y = result.split(model.d1)
    return mean_and_se(f.value(x[0], y[0]))


def estimate_decay(model, f, t_grid, n_outer, seed, config=None, product=None):
    """Variance decay μ((T_t f)²) - μ(T_t f)² by the pair-coupled nested estimator

    Every outer start z_i ~ μ launches two independent paths; f(path₁(t))·f(path₂(t)) is an
    unbiased estimate of (T_t f)²(z_i). μ(T_t f) = μ(f) comes from quadrature.
    """
    config = config or IntegratorConfig()
    if n_outer < 2:
        raise ValidationError(f"need at least two outer samples, got {n_outer}", "n_outer")
    t_grid, _ = _record_steps(config, t_grid)
    product = product or ProductMeasure.from_potentials(model.phi, model.psi)
    starts = sample_starts(model, n_outer, seed, product)
    mean_f = product.integrate(f.value)

    first = run_ensemble(model, config, starts, seed, t_grid, pair=0)
    second = run_ensemble(model, config, starts, seed, t_grid, pair=1)
    x1, y1 = first.split(model.d1)
    x2, y2 = second.split(model.d1)

    v_hat, se = np.empty(len(t_grid)), np.empty(len(t_grid))
    for k in range(len(t_grid)):
        products = f.value(x1[k], y1[k]) * f.value(x2[k], y2[k])
        second_moment, se[k] = mean_and_se(products)
        v_hat[k] = second_moment - mean_f**2
    LOG.info("Estimated variance decay at %d times from %d path pairs", len(t_grid), n_outer)
    return DecayEstimate(t_grid, v_hat, se, int(n_outer), 2, int(seed), config.h, mean_f)


def martingale_residual(model, f, t, N, seed, config=None, product=None):
    """Mean and SE of M_t = f(Z_t) - f(Z_0) - ∫₀ᵗ Lf(Z_s) ds with Z_0 ~ μ"""
    values = _martingale_values(model, f, t, N, seed, config, product)
    if values is None:
        return 0.0, 0.0
    increment, integral = values
    return mean_and_se(increment - integral[..., 0])


def quadratic_martingale_residual(model, f, t, N, seed, config=None, product=None):
    """Mean and SE of (M_t)² - ∫₀ᵗ 2Γ(f)(Z_s) ds with Z_0 ~ μ"""
    values = _martingale_values(model, f, t, N, seed, config, product, quadratic=True)
    if values is None:
        return 0.0, 0.0
    increment, integral = values
    martingale = increment - integral[..., 0]
    return mean_and_se(martingale**2 - 2.0 * integral[..., 1])


def _martingale_values(model, f, t, N, seed, config, product, quadratic=False):
    config = config or IntegratorConfig()
    if N < 2:
        raise ValidationError(f"need at least two paths, got N={N}", key_path="N")
    if config.steps(t) == 0:
        return None
    starts = sample_starts(model, N, seed, product)
    integrands = [lambda x, y: apply_L(model, f, x, y)]
    if quadratic:
        integrands.append(lambda x, y: carre_du_champ(model, f, x, y))
    result = run_ensemble(model, config, starts, seed, [0.0, t], integrands=integrands)
    x, y = result.split(model.d1)
    increment = f.value(x[1], y[1]) - f.value(x[0], y[0])
    return increment, result.integrals[1]


def simulate_paths(model, start, t_grid, n_paths, seed, config=None):
    """Raw trajectories of shape (n_paths, len(t_grid), d1 + d2)

    ``start`` is a single point (or an ``(x, y)`` pair) shared by all paths, or the string
    ``"stationary"`` to draw the starting points from μ.
    """
    config = config or IntegratorConfig()
    if n_paths < 1:
        raise ValidationError(f"need at least one path, got {n_paths}", key_path="n_paths")
    if isinstance(start, str):
        if start != "stationary":
            raise ValidationError(f"unknown start '{start}'", key_path="start")
        starts = sample_starts(model, n_paths, seed)
    else:
        starts = np.tile(_start_point(model, start), (n_paths, 1))
    result = run_ensemble(model, config, starts, seed, t_grid)
    return np.swapaxes(result.states, 0, 1)
