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
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.gibbs import GibbsMeasure
from kinetic.langevin.model.derivatives import check_potential, third_derivatives
from kinetic.langevin.model.potentials import CUSTOM, LOG_POWER, POWER_LAW, QUADRATIC
from kinetic.langevin.model.probes import ProbeSpec

LOG = logging.getLogger("kinetic-langevin")

PASS = "pass"
FAIL = "fail"
UNTESTABLE = "untestable"

CONDITION_IDS = ("Σ1", "Σ2", "Σ3", "Σ4", "Φ1", "Φ2", "Φ3", "Ψ1", "Ψ2", "Ψ3", "Ψ5", "Ψ6")

MARGIN_TOL = 1e-9
SYMMETRY_TOL = 1e-12
RADIAL_TOL = 1e-10
# an estimated constant is refuted when the outer points need this multiple of it
GROWTH_FACTOR = 4.0


@dataclass(frozen=True)
class ConditionEntry:
    id: str
    status: str
    witness: Optional[Tuple[float, ...]] = None
    margin: Optional[float] = None
    note: str = ""


@dataclass(frozen=True)
class ConditionReport:
    """One entry per checked hypothesis, in a fixed order"""

    entries: Tuple[ConditionEntry, ...]

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if sorted(ids) != sorted(CONDITION_IDS):
            raise ValueError(f"report must hold exactly the conditions {CONDITION_IDS}, got {ids}")

    def __getitem__(self, condition_id):
        for entry in self.entries:
            if entry.id == condition_id:
                return entry
        raise KeyError(condition_id)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def passed(self):
        return all(e.status != FAIL for e in self.entries)

    @property
    def failures(self):
        return [e.id for e in self.entries if e.status == FAIL]

    def to_frame(self):
        return pd.DataFrame(
            {
                "id": [e.id for e in self.entries],
                "status": [e.status for e in self.entries],
                "margin": [np.nan if e.margin is None else e.margin for e in self.entries],
                "witness": [
                    "" if e.witness is None else " ".join(f"{w:.17g}" for w in e.witness)
                    for e in self.entries
                ],
                "note": [e.note for e in self.entries],
            }
        )


def _bound_entry(cid, lhs, rhs, points, note="", status_ok=PASS):
    """Entry for a pointwise inequality lhs <= rhs evaluated on ``points``"""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    slack = (rhs - lhs) / np.maximum(1.0, np.abs(rhs))
    slack = np.where(np.isfinite(slack), slack, -np.inf)
    worst = int(np.argmin(slack))
    margin = float(slack[worst])
    status = status_ok if margin >= -MARGIN_TOL else FAIL
    return ConditionEntry(cid, status, _witness(points, worst), margin, note)


def _estimated_entry(cid, lhs, scale, points, name, note=""):
    """Entry for lhs <= K * scale when the constant K is not known

    K is estimated on the inner half of the sampling cube and checked on the disjoint outer
    points. The condition fails when the outer points need more than GROWTH_FACTOR times the
    estimate, otherwise it stays untestable since no finite point set bounds K globally.
    """
    ratio = np.asarray(lhs, dtype=float) / np.asarray(scale, dtype=float)
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    extent = np.abs(points).max(axis=-1)
    inner = extent <= 0.5 * extent.max()
    prefix = f"{note}, " if note else ""
    if inner.all() or not inner.any():
        estimate = float(np.max(ratio))
        return ConditionEntry(
            cid, UNTESTABLE, None, None, f"{prefix}{name} estimated as {estimate:.6g}"
        )
    estimate = float(np.max(ratio[inner]))
    outer = np.flatnonzero(~inner)
    worst = int(outer[np.argmax(ratio[outer])])
    ceiling = GROWTH_FACTOR * max(estimate, 1.0)
    note = (
        f"{prefix}{name} estimated on |z|∞ <= {0.5 * extent.max():.6g} as {estimate:.6g}, "
        f"outer points need {float(ratio[worst]):.6g}"
    )
    if ratio[worst] > ceiling:
        margin = (ceiling - ratio[worst]) / ceiling if np.isfinite(ratio[worst]) else -np.inf
        return ConditionEntry(
            cid, FAIL, _witness(points, worst), float(margin), f"{note}; {name} is not bounded"
        )
    return ConditionEntry(cid, UNTESTABLE, _witness(points, worst), None, note)


def _witness(points, index):
    return tuple(float(v) for v in np.atleast_1d(points[index]))


def _finite_entry(cid, values, points, note):
    bad = ~np.isfinite(np.asarray(values, dtype=float).reshape(len(points), -1)).all(axis=1)
    if np.any(bad):
        return ConditionEntry(cid, FAIL, _witness(points, int(np.argmax(bad))), None, note)
    return None


def _build_measure(potential):
    try:
        return GibbsMeasure.from_potential(potential), ""
    except (NumericalError, ValidationError) as exc:
        return None, str(exc)


def _sigma_entries(model, points, mu2):
    sigma = model.sigma
    builtin = sigma.family != CUSTOM
    entries = {}

    matrices = np.asarray(sigma.matrix(points), dtype=float)
    scale = np.maximum(1.0, np.abs(matrices).max(axis=(-2, -1)))
    asym = np.abs(matrices - np.swapaxes(matrices, -1, -2)).max(axis=(-2, -1)) / scale
    if not np.all(np.isfinite(matrices)):
        bad = ~np.isfinite(matrices).all(axis=(-2, -1))
        entries["Σ1"] = ConditionEntry(
            "Σ1", FAIL, _witness(points, int(np.argmax(bad))), None, "Σ(y) is not finite"
        )
    elif asym.max() > SYMMETRY_TOL:
        entries["Σ1"] = ConditionEntry(
            "Σ1", FAIL, _witness(points, int(np.argmax(asym))), None, "Σ(y) is not symmetric"
        )
    else:
        smallest = np.linalg.eigvalsh(matrices)[..., 0]
        floor = np.full_like(smallest, 1.0 / sigma.ellipticity)
        entries["Σ1"] = _bound_entry(
            "Σ1", floor, smallest, points, note=f"c_Σ={sigma.ellipticity:.6g}"
        )

    grads = None
    if sigma.gradient is not None:
        grads = np.asarray(sigma.gradient(points), dtype=float)

    # Σ2: bounded, locally Lipschitz entries
    if grads is None:
        entries["Σ2"] = ConditionEntry("Σ2", FAIL, note="diffusion gradient unavailable")
    else:
        failed = _finite_entry("Σ2", grads, points, "∂_k a_ij is not finite")
        if failed is not None:
            entries["Σ2"] = failed
        elif sigma.M_sigma is not None:
            status = PASS if builtin else UNTESTABLE
            entries["Σ2"] = _bound_entry(
                "Σ2",
                np.abs(matrices).max(axis=(-2, -1)),
                np.full(len(points), sigma.M_sigma),
                points,
                note=f"M_Σ={sigma.M_sigma:.6g}",
                status_ok=status,
            )
        else:
            peak = int(np.argmax(np.abs(matrices).max(axis=(-2, -1))))
            entries["Σ2"] = ConditionEntry(
                "Σ2",
                UNTESTABLE,
                _witness(points, peak),
                None,
                f"boundedness only observed on probes, max |a_ij|={np.abs(matrices).max():.6g}",
            )

    # Σ3: |∂_k a_ij(y)| <= M(1_{B1}(y) + |y|^β)
    if grads is None or not np.all(np.isfinite(grads)):
        entries["Σ3"] = ConditionEntry("Σ3", FAIL, note="diffusion gradient unavailable")
    else:
        norm = np.linalg.norm(points, axis=-1)
        weight = (norm <= 1.0).astype(float) + norm**sigma.beta
        worst = np.abs(grads).max(axis=(-3, -2, -1))
        if sigma.M is not None:
            entries["Σ3"] = _bound_entry(
                "Σ3",
                worst,
                sigma.M * weight,
                points,
                note=f"M={sigma.M:.6g}, β={sigma.beta}",
                status_ok=PASS if builtin else UNTESTABLE,
            )
        else:
            entries["Σ3"] = _estimated_entry("Σ3", worst, weight, points, "M", f"β={sigma.beta}")

    # Σ4: |∇Σ| in L^{2p}(μ₂)
    if grads is None:
        entries["Σ4"] = ConditionEntry("Σ4", FAIL, note="diffusion gradient unavailable")
    elif mu2 is None:
        entries["Σ4"] = ConditionEntry("Σ4", UNTESTABLE, note="μ₂ quadrature unavailable")
    else:
        node_grads = np.linalg.norm(
            np.asarray(sigma.gradient(mu2.nodes), dtype=float).reshape(len(mu2.nodes), -1), axis=-1
        )
        if math.isinf(sigma.p_sigma):
            value = float(np.max(node_grads)) if node_grads.size else 0.0
            note = f"p_Σ=inf, sup |∇Σ| on nodes {value:.6g}"
        else:
            value = float(np.dot(mu2.weights, node_grads ** (2.0 * sigma.p_sigma)))
            note = f"p_Σ={sigma.p_sigma}, ∫|∇Σ|^(2p) dμ₂={value:.6g}"
        status = PASS if math.isfinite(value) else FAIL
        entries["Σ4"] = ConditionEntry("Σ4", status, None, None, note)
    return entries


def _default_gamma(potential):
    if potential.metadata.gamma is not None:
        return potential.metadata.gamma
    if potential.family == POWER_LAW:
        return max(potential.params["eps"] - 1.0, 0.0)
    if potential.family == LOG_POWER:
        return 0.0
    if potential.family == QUADRATIC:
        return 1.0
    return None


def _phi_entries(model, points, mu1, mu1_error):
    phi = model.phi
    builtin = phi.family != CUSTOM
    closed = phi.growth_bounds()
    # constants supplied for a custom family are only checked on the sample points
    supplied_ok = PASS if builtin else UNTESTABLE
    entries = {}

    values = np.asarray(phi.value(points), dtype=float)
    grads = np.asarray(phi.gradient(points), dtype=float)
    hessians = np.asarray(phi.hessian(points), dtype=float)
    gradient_check, _ = check_potential(phi, points)
    failed = _finite_entry("Φ1", values, points, "Φ is not finite")
    if failed is not None:
        entries["Φ1"] = failed
    elif not gradient_check.passed:
        entries["Φ1"] = ConditionEntry(
            "Φ1",
            FAIL,
            tuple(gradient_check.witness),
            -gradient_check.max_error,
            "gradient disagrees with finite differences of Φ",
        )
    elif mu1 is None:
        entries["Φ1"] = ConditionEntry("Φ1", FAIL, note=f"Z(Φ) not finite: {mu1_error}")
    else:
        note = f"min Φ on probes {values.min():.6g}, Z(Φ)={mu1.Z:.10g}"
        entries["Φ1"] = ConditionEntry("Φ1", PASS if builtin else UNTESTABLE, None, None, note)

    # Φ2
    grad_norm = np.linalg.norm(grads, axis=-1)
    if mu1 is None:
        entries["Φ2"] = ConditionEntry("Φ2", UNTESTABLE, note="μ₁ quadrature unavailable")
    else:
        l2 = mu1.moment(lambda x: np.sum(phi.gradient(x) ** 2, axis=-1))
        beta = model.sigma.beta
        gamma = _default_gamma(phi)
        if not math.isfinite(l2):
            entries["Φ2"] = ConditionEntry("Φ2", FAIL, note="|∇Φ| not in L²(μ₁)")
        elif beta == 0.0:
            note = f"β=0, ∫|∇Φ|² dμ₁={l2:.6g}" + (f", γ={gamma:.6g}" if gamma is not None else "")
            entries["Φ2"] = ConditionEntry("Φ2", PASS, None, None, note)
        elif gamma is None:
            entries["Φ2"] = ConditionEntry(
                "Φ2", UNTESTABLE, None, None, "growth exponent γ unknown for a custom Φ"
            )
        elif gamma >= 1.0 / beta:
            entries["Φ2"] = ConditionEntry(
                "Φ2", FAIL, None, None, f"γ={gamma:.6g} is not below 1/β={1.0 / beta:.6g}"
            )
        else:
            growth = 1.0 + np.linalg.norm(points, axis=-1) ** gamma
            n_const = phi.metadata.N
            if n_const is None and closed is not None and phi.metadata.gamma is None:
                n_const = closed.N
            note = f"γ={gamma:.6g}, ∫|∇Φ|² dμ₁={l2:.6g}"
            if n_const is None:
                entries["Φ2"] = _estimated_entry("Φ2", grad_norm, growth, points, "N", note)
            else:
                note += f", N={n_const:.6g}"
                entries["Φ2"] = _bound_entry(
                    "Φ2", grad_norm, n_const * growth, points, note, status_ok=supplied_ok
                )

    # Φ3: |∇²Φ| <= C(1 + |∇Φ|)
    hess_norm = np.linalg.norm(hessians, axis=(-2, -1))
    c_const = phi.metadata.C
    if c_const is None and closed is not None:
        c_const = closed.C
    if c_const is None:
        entries["Φ3"] = _estimated_entry("Φ3", hess_norm, 1.0 + grad_norm, points, "C")
    else:
        entries["Φ3"] = _bound_entry(
            "Φ3",
            hess_norm,
            c_const * (1.0 + grad_norm),
            points,
            f"C={c_const:.6g}",
            status_ok=supplied_ok,
        )
    return entries


def _psi_entries(model, points, mu2, mu2_error):
    psi = model.psi
    builtin = psi.family != CUSTOM
    supplied_ok = PASS if builtin else UNTESTABLE
    entries = {}

    values = np.asarray(psi.value(points), dtype=float)
    grads = np.asarray(psi.gradient(points), dtype=float)
    hessians = np.asarray(psi.hessian(points), dtype=float)

    failed = _finite_entry("Ψ1", values, points, "Ψ is not finite")
    if failed is not None:
        entries["Ψ1"] = failed
    elif mu2 is None:
        entries["Ψ1"] = ConditionEntry("Ψ1", FAIL, note=f"Z(Ψ) not finite: {mu2_error}")
    else:
        note = f"Z(Ψ)={mu2.Z:.10g}, truncation radius {mu2.radius:g}"
        entries["Ψ1"] = ConditionEntry("Ψ1", PASS if builtin else UNTESTABLE, None, None, note)

    gradient_check, hessian_check = check_potential(psi, points)
    worst = max((gradient_check, hessian_check), key=lambda c: c.max_error)
    if not worst.passed:
        entries["Ψ2"] = ConditionEntry(
            "Ψ2",
            FAIL,
            tuple(worst.witness),
            -worst.max_error,
            "derivatives disagree with finite differences",
        )
    else:
        note = f"finite-difference error {worst.max_error:.3e}"
        entries["Ψ2"] = ConditionEntry("Ψ2", PASS if builtin else UNTESTABLE, None, None, note)

    # Ψ3: |∇²Ψ| <= K(1 + |∇Ψ|^α) with α in [1, 2)
    alpha = psi.metadata.alpha if psi.metadata.alpha is not None else 1.0
    grad_norm = np.linalg.norm(grads, axis=-1)
    hess_norm = np.linalg.norm(hessians, axis=(-2, -1))
    if not 1.0 <= alpha < 2.0:
        entries["Ψ3"] = ConditionEntry("Ψ3", FAIL, note=f"α={alpha} is outside [1, 2)")
    else:
        k_const = psi.metadata.K
        closed = psi.growth_bounds()
        if k_const is None and closed is not None:
            # 1 + |∇Ψ| <= 2(1 + |∇Ψ|^α) for α >= 1
            k_const = closed.C if alpha == 1.0 else 2.0 * closed.C
        note = f"α={alpha:.6g}"
        scale = 1.0 + grad_norm**alpha
        if k_const is None:
            entries["Ψ3"] = _estimated_entry("Ψ3", hess_norm, scale, points, "K", note)
        else:
            note += f", K={k_const:.6g}"
            entries["Ψ3"] = _bound_entry(
                "Ψ3", hess_norm, k_const * scale, points, note, status_ok=supplied_ok
            )

    # Ψ5: Ψ(y) = ψ(|y|²)
    deviation = psi.radial_deviation(points)
    worst_point = int(np.argmax(deviation))
    if deviation[worst_point] <= RADIAL_TOL:
        entries["Ψ5"] = ConditionEntry("Ψ5", PASS, None, float(-deviation.max()), "")
    else:
        note = "Ψ is not radial"
        if psi.family == QUADRATIC:
            note += "; normalize_quadratic maps it to a radial potential"
        entries["Ψ5"] = ConditionEntry(
            "Ψ5", FAIL, _witness(points, worst_point), float(-deviation[worst_point]), note
        )

    # Ψ6: third derivatives in L²(μ₂)
    if mu2 is None:
        entries["Ψ6"] = ConditionEntry("Ψ6", UNTESTABLE, note="μ₂ quadrature unavailable")
    else:
        thirds = third_derivatives(psi, mu2.nodes)
        squared = np.sum(thirds.reshape(len(mu2.nodes), -1) ** 2, axis=-1)
        value = float(np.dot(mu2.weights, squared))
        status = (PASS if builtin else UNTESTABLE) if math.isfinite(value) else FAIL
        entries["Ψ6"] = ConditionEntry(
            "Ψ6", status, None, None, f"Σ ∫(∂_i∂_j∂_kΨ)² dμ₂={value:.6g}"
        )
    return entries


def validate_conditions(model, probe_spec=None):
    """Check every hypothesis on deterministic Halton probes

    Inequalities report their worst relative margin and the probe where it occurs.
    Conditions that need global knowledge of a user supplied (custom) family are marked
    untestable, with the probe evidence in the note. Failures are entries, never errors.
    """
    probes = probe_spec or ProbeSpec()
    points_x = probes.points(model.d1)
    points_y = probes.points(model.d2)
    mu1, mu1_error = _build_measure(model.phi)
    mu2, mu2_error = _build_measure(model.psi)

    entries = {}
    entries.update(_sigma_entries(model, points_y, mu2))
    entries.update(_phi_entries(model, points_x, mu1, mu1_error))
    entries.update(_psi_entries(model, points_y, mu2, mu2_error))
    report = ConditionReport(tuple(entries[cid] for cid in CONDITION_IDS))
    LOG.info(
        "Validated %s: %d pass, %d fail, %d untestable",
        model.name or "model",
        sum(e.status == PASS for e in report),
        sum(e.status == FAIL for e in report),
        sum(e.status == UNTESTABLE for e in report),
    )
    return report
