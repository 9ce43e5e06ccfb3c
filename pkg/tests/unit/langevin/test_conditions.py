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
import numpy as np
import pytest

from kinetic.langevin.model import diffusion, potentials
from kinetic.langevin.model.conditions import (
    CONDITION_IDS,
    FAIL,
    PASS,
    UNTESTABLE,
    ConditionReport,
    validate_conditions,
)
from kinetic.langevin.model.potentials import PotentialMetadata, PotentialSpec
from kinetic.langevin.model.probes import ProbeSpec
from kinetic.langevin.model.spec import ModelSpec
from tests.conftest import make_model

PROBES = ProbeSpec(radius=5.0, count=256)


def test_ou_satisfies_every_condition(ou_model):
    report = validate_conditions(ou_model, PROBES)
    assert [e.id for e in report] == list(CONDITION_IDS)
    assert all(e.status == PASS for e in report), report.to_frame()
    assert report.passed
    assert report.failures == []


@pytest.mark.parametrize("fixture", ["bounded_sigma_model", "stretched_model", "log_model"])
def test_builtin_models_pass(request, fixture):
    report = validate_conditions(request.getfixturevalue(fixture), PROBES)
    assert report.passed, report.to_frame()


def test_report_frame(ou_model):
    frame = validate_conditions(ou_model, PROBES).to_frame()
    assert list(frame.columns) == ["id", "status", "margin", "witness", "note"]
    assert len(frame) == len(CONDITION_IDS)
    assert frame.set_index("id").loc["Σ1", "note"].startswith("c_Σ=")


def test_non_radial_velocity_potential_fails():
    model = ModelSpec(
        1,
        2,
        np.array([[1.0, 1.0]]),
        potentials.quadratic([[1.0]]),
        potentials.quadratic(np.diag([2.0, 1.0])),
        diffusion.identity(2),
    )
    report = validate_conditions(model, PROBES)
    assert report.failures == ["Ψ5"]
    assert "normalize_quadratic" in report["Ψ5"].note
    assert report["Ψ5"].witness is not None


def test_alpha_outside_range_fails(ou_model):
    psi = potentials.quadratic([[1.0]], metadata=PotentialMetadata(alpha=2.5))
    report = validate_conditions(make_model(ou_model.phi, psi), PROBES)
    assert report["Ψ3"].status == FAIL


def test_non_integrable_position_potential():
    model = make_model(potentials.log_power(-0.5, 1), potentials.quadratic([[1.0]]))
    report = validate_conditions(model, PROBES)
    assert report["Φ1"].status == FAIL
    assert "Z(Φ) not finite" in report["Φ1"].note
    assert report["Φ2"].status == UNTESTABLE
    assert not report.passed


def test_wrong_gradient_is_reported_with_witness(ou_model):
    good = potentials.quadratic([[1.0]])
    broken = potentials.custom(1, good.value, lambda x: 1.1 * np.asarray(x), good.hessian)
    report = validate_conditions(make_model(broken, ou_model.psi), PROBES)
    assert report["Φ1"].status == FAIL
    assert report["Φ1"].margin < 0
    assert len(report["Φ1"].witness) == 1


def test_custom_families_are_untestable(ou_model):
    config = {
        "family": "custom",
        "module_name": "tests.unit.langevin.custom_components",
        "class_name": "QuarticWell",
    }
    phi = PotentialSpec.from_config(config, 1)
    carried = diffusion.scalar_bounded(0.5, 1)
    sigma = diffusion.DiffusionField(1, carried.matrix, carried.gradient, ellipticity=1.0)
    report = validate_conditions(make_model(phi, ou_model.psi, sigma), PROBES)
    assert report["Φ1"].status == UNTESTABLE
    assert report["Σ2"].status == UNTESTABLE
    assert report.passed


def test_ellipticity_violation():
    carried = diffusion.scalar_bounded(-0.5, 1)
    # claims Σ >= 1 while Σ(y) -> 1/2 in the tails
    sigma = diffusion.DiffusionField(1, carried.matrix, carried.gradient, ellipticity=1.0)
    model = make_model(potentials.quadratic([[1.0]]), potentials.quadratic([[1.0]]), sigma)
    report = validate_conditions(model, PROBES)
    assert report["Σ1"].status == FAIL
    assert report["Σ1"].margin < 0


def test_missing_diffusion_gradient():
    sigma = diffusion.DiffusionField(1, diffusion.identity(1).matrix, None, ellipticity=1.0)
    model = make_model(potentials.quadratic([[1.0]]), potentials.quadratic([[1.0]]), sigma)
    report = validate_conditions(model, PROBES)
    for cid in ("Σ2", "Σ3", "Σ4"):
        assert report[cid].status == FAIL
        assert report[cid].note == "diffusion gradient unavailable"


def test_growth_exponent_must_stay_below_inverse_beta(ou_model):
    carried = diffusion.scalar_bounded(0.5, 1)
    sigma = diffusion.DiffusionField(
        1,
        carried.matrix,
        carried.gradient,
        ellipticity=1.0,
        M_sigma=carried.M_sigma,
        B_sigma=carried.B_sigma,
        M=carried.M,
        beta=0.5,
        family=diffusion.SCALAR_BOUNDED,
    )
    steep = potentials.power_law(1.0, 4.0, 1)
    report = validate_conditions(make_model(steep, ou_model.psi, sigma), PROBES)
    # γ = 3 for a quartic-like power law, 1/β = 2
    assert report["Φ2"].status == FAIL
    report = validate_conditions(make_model(ou_model.phi, ou_model.psi, sigma), PROBES)
    assert report["Φ2"].status == PASS
    mild = potentials.power_law(1.0, 1.5, 1)
    report = validate_conditions(make_model(mild, ou_model.psi, sigma), PROBES)
    assert report["Φ2"].status == PASS


def test_report_requires_every_condition():
    with pytest.raises(ValueError):
        ConditionReport(())


def test_check_points_are_deterministic():
    probes = ProbeSpec(radius=2.0, count=64)
    points = probes.points(2)
    assert points.shape == (64, 2)
    assert np.all(np.abs(points) <= 2.0)
    np.testing.assert_array_equal(points, ProbeSpec(radius=2.0, count=64).points(2))
    ball = probes.ball(2)
    np.testing.assert_array_equal(ball[0], [0.0, 0.0])
    assert np.all(np.linalg.norm(ball, axis=-1) <= 1.0)


def test_probe_spec_errors():
    with pytest.raises(ValueError):
        ProbeSpec(radius=0.0)
    with pytest.raises(ValueError):
        ProbeSpec(count=0)
    with pytest.raises(ValueError) as exc:
        ProbeSpec.from_config({"depth": 3})
    assert exc.value.key_path == "probes"


def _custom_potential(class_name):
    config = {
        "family": "custom",
        "module_name": "tests.unit.langevin.custom_components",
        "class_name": class_name,
    }
    return PotentialSpec.from_config(config, 1)


def test_unbounded_hessian_ratio_fails(ou_model):
    psi = _custom_potential("RipplingWell")
    probes = ProbeSpec()
    report = validate_conditions(make_model(ou_model.phi, psi), probes)
    entry = report["Ψ3"]
    assert entry.status == FAIL, entry.note
    assert entry.margin < 0
    assert abs(entry.witness[0]) > 0.5 * probes.radius
    assert "K estimated" in entry.note
    assert not report.passed


def test_estimated_constant_without_growth_is_untestable():
    quartic = _custom_potential("QuarticWell")
    report = validate_conditions(make_model(quartic, quartic), PROBES)
    for cid in ("Φ3", "Ψ3"):
        assert report[cid].status == UNTESTABLE, report[cid].note
        assert "estimated" in report[cid].note


def test_estimated_diffusion_slope_growth_fails(ou_model):
    # ∂a = 4y³ is not bounded by M(1_{B1} + |y|^β) with β = 0
    sigma = diffusion.DiffusionField(
        1,
        lambda y: (1.0 + np.asarray(y)[..., 0] ** 4)[..., None, None],
        lambda y: (4.0 * np.asarray(y)[..., 0] ** 3)[..., None, None, None],
        ellipticity=1.0,
    )
    report = validate_conditions(make_model(ou_model.phi, ou_model.psi, sigma), PROBES)
    assert report["Σ3"].status == FAIL, report["Σ3"].note
    assert "M estimated" in report["Σ3"].note
    assert abs(report["Σ3"].witness[0]) > 2.5


def test_builtin_constants_are_closed_form(ou_model):
    report = validate_conditions(ou_model, PROBES)
    assert "C=1" in report["Φ3"].note
    assert "K=1" in report["Ψ3"].note
    assert "N=1" in report["Φ2"].note or report["Φ2"].note.startswith("β=0")


@pytest.mark.parametrize(
    "potential",
    [
        potentials.quadratic([[2.0, 0.5], [0.0, 1.0]], shift=[1.0, -1.0]),
        potentials.power_law(1.0, 0.5, 2),
        potentials.power_law(2.0, 3.0, 2),
        potentials.power_law(0.5, 4.0, 1),
        potentials.log_power(10.0, 2),
    ],
)
def test_growth_bounds_dominate(potential):
    bounds = potential.growth_bounds()
    points = ProbeSpec(radius=20.0, count=4096).points(potential.dim)
    grads = np.linalg.norm(potential.gradient(points), axis=-1)
    hess = np.linalg.norm(potential.hessian(points), axis=(-2, -1))
    assert np.all(hess <= bounds.C * (1.0 + grads) * (1 + 1e-12))
    growth = 1.0 + np.linalg.norm(points, axis=-1) ** bounds.gamma
    assert np.all(grads <= bounds.N * growth * (1 + 1e-12))


def test_custom_potential_has_no_growth_bounds():
    assert _custom_potential("QuarticWell").growth_bounds() is None


def test_supplied_constants_of_custom_potentials(ou_model):
    quartic = _custom_potential("QuarticWell")
    report = validate_conditions(make_model(ou_model.phi, quartic.with_metadata(K=2.0)), PROBES)
    assert report["Ψ3"].status == UNTESTABLE
    assert report["Ψ3"].margin > 0
    report = validate_conditions(make_model(ou_model.phi, quartic.with_metadata(K=0.5)), PROBES)
    assert report["Ψ3"].status == FAIL
    assert report["Ψ3"].margin < 0
