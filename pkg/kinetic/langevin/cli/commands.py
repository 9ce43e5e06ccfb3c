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

import numpy as np
import pandas as pd

from kinetic.langevin.cli.report import compare
from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.fporacle.evolve import decay_curve, propagate
from kinetic.langevin.fporacle.fp import fp_distance_curve
from kinetic.langevin.fporacle.grid import build_grid_operator, spectral_abscissa
from kinetic.langevin.measures.gibbs import ProductMeasure
from kinetic.langevin.model.conditions import validate_conditions
from kinetic.langevin.rates.envelope import EXPONENTIAL, POLYLOG, PRESETS, envelope_from_config
from kinetic.langevin.rates.exponents import reference_xi, theoretical_exponent
from kinetic.langevin.rates.fitting import fit_power_exponent, fit_stretching_exponent
from kinetic.langevin.sde.ensemble import estimate_decay, simulate_paths

LOG = logging.getLogger("kinetic-langevin")


@dataclass
class CommandOutput:
    """CSV tables keyed by file stem plus scalar results for the manifest"""

    tables: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)


def run_validate(config):
    report = validate_conditions(config.model, config.probes)
    return CommandOutput(
        {"conditions": report.to_frame()},
        {"passed": report.passed, "failures": report.failures},
    )


def _asymptotic_half(t, values):
    start = len(t) // 2
    return t[start:], values[start:]


def run_rate(config):
    envelope, family, params = envelope_from_config(config.envelope)
    t = config.section("rate")["t_grid"]
    log_xi = np.asarray(envelope.log_xi(t), dtype=float)
    table = pd.DataFrame({"t": t, "xi": np.exp(log_xi), "log_xi": log_xi})
    results = {"family": family}

    if family in PRESETS:
        table["reference_xi"] = reference_xi(family, params, t, envelope.c2)
        results["theoretical_exponent"] = theoretical_exponent(family, params)
        tail_t, tail_xi = _asymptotic_half(t, np.exp(log_xi))
        if family == POLYLOG:
            fit = fit_power_exponent(tail_t, tail_xi)
        else:
            fit = fit_stretching_exponent(tail_t, tail_xi)
        results.update(fitted_exponent=fit.exponent, exponent_se=fit.stderr)
        LOG.info(
            "Fitted %s exponent %.4g ± %.2g, theory %.4g",
            family,
            fit.exponent,
            fit.stderr,
            results["theoretical_exponent"],
        )
    return CommandOutput({"rate": table}, results)


def run_simulate(config):
    section = config.section("simulate")
    t_grid = section["t_grid"]
    paths = simulate_paths(
        config.model,
        section["start"],
        t_grid,
        section["n_paths"],
        config.seed,
        config.integrator,
    )
    n_paths = paths.shape[0]
    d1 = config.model.d1
    columns = {
        "path": np.repeat(np.arange(n_paths), len(t_grid)),
        "t": np.tile(t_grid, n_paths),
    }
    flat = paths.reshape(-1, paths.shape[-1])
    for k in range(d1):
        columns[f"x{k}"] = flat[:, k]
    for k in range(config.model.d2):
        columns[f"y{k}"] = flat[:, d1 + k]
    return CommandOutput({"paths": pd.DataFrame(columns)}, {"n_paths": n_paths})


def _mc_decay(config, product):
    section = config.section("decay")
    return estimate_decay(
        config.model,
        config.test_function,
        section["t_grid"],
        section["n_outer"],
        config.seed,
        config.integrator,
        product=product,
    )


def run_decay(config):
    product = ProductMeasure.from_potentials(config.model.phi, config.model.psi)
    estimate = _mc_decay(config, product)
    return CommandOutput(
        {"decay": estimate.to_frame()},
        {"mean_f": estimate.mean_f, "v_hat_0": float(estimate.v_hat[0])},
    )


def _grid(config):
    section = config.section("grid")
    return build_grid_operator(config.model, section["R"], section["n_x"], section["n_y"])


def _gaussian_density(gs, spec):
    mean = np.asarray(spec.get("mean", [0.0, 0.0]), dtype=float)
    std = np.asarray(spec.get("std", [1.0, 1.0]), dtype=float)
    if mean.shape != (2,) or std.shape != (2,) or np.any(std <= 0):
        raise ValidationError("needs two means and two positive deviations", "grid.density0")
    xx, yy = gs.mesh()
    density = np.exp(-0.5 * ((xx - mean[0]) / std[0]) ** 2 - 0.5 * ((yy - mean[1]) / std[1]) ** 2)
    return density / (density.sum() * gs.cell_area)


def run_fpsolve(config):
    section = config.section("grid")
    gs = _grid(config)
    f = gs.grid_vector(config.test_function.value)
    curve = decay_curve(gs, f, section["t_grid"], section["dt"])
    output = CommandOutput({"fp_decay": curve.to_frame()}, {"identities": gs.identities()})

    if section["density0"] is not None:
        density0 = _gaussian_density(gs, section["density0"])
        distance = fp_distance_curve(gs, density0, section["t_grid"], section["dt"])
        output.tables["fp_distance"] = distance.to_frame()
    if section["snapshots"]:
        times, states = propagate(gs.L, f, section["t_grid"], section["dt"])
        xx, yy = gs.mesh()
        output.tables["fp_field"] = pd.DataFrame(
            {
                "t": np.repeat(times, gs.size),
                "x": np.tile(xx, len(times)),
                "y": np.tile(yy, len(times)),
                "u": np.concatenate(states),
            }
        )
    if section["spectrum"]:
        output.results["spectral_abscissa"] = spectral_abscissa(gs)
    return output


def _scale(config, variance):
    oscillation = config.test_function.oscillation
    if oscillation is not None and math.isfinite(oscillation) and oscillation > 0:
        return oscillation**2
    return variance


def run_compare(config):
    envelope, family, params = envelope_from_config(config.envelope)
    source = config.section("decay")["source"]
    product = ProductMeasure.from_potentials(config.model.phi, config.model.psi)
    f = config.test_function
    mean_f = product.integrate(f.value)
    variance = product.integrate(lambda x, y: f.value(x, y) ** 2) - mean_f**2

    if source == "mc":
        data = _mc_decay(config, product)
    else:
        section = config.section("grid")
        gs = _grid(config)
        data = decay_curve(gs, gs.grid_vector(f.value), section["t_grid"], section["dt"])
    report = compare(data, envelope, family, params, _scale(config, variance), source)
    if report.violations:
        LOG.warning("Envelope fit leaves %d violations", report.violations)
    if family == EXPONENTIAL:
        LOG.info("Exponential envelope fitted with rate c2 = %.6g", report.c2)
    return CommandOutput(
        {"comparison": report.table, "decay": data.to_frame()}, report.summary()
    )


COMMANDS = {
    "validate": run_validate,
    "rate": run_rate,
    "simulate": run_simulate,
    "decay": run_decay,
    "fpsolve": run_fpsolve,
    "compare": run_compare,
}
