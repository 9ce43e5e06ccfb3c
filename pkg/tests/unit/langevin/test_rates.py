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

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model import functions
from kinetic.langevin.rates import (
    DecayEnvelope,
    WeakPoincareProfile,
    count_violations,
    envelope_from_config,
    fit_constants,
    fit_power_exponent,
    fit_stretching_exponent,
    omega_poly,
    omega_stretched,
    preset_profiles,
    reference_xi,
    theoretical_exponent,
    theta,
    xi_eval,
    xi_log,
)
from kinetic.langevin.sde import IntegratorConfig, estimate_decay
from tests.conftest import tensor_function

positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


def _envelope(family, params, **kwargs):
    alpha1, alpha2 = preset_profiles(family, params)
    return DecayEnvelope(alpha1, alpha2, **kwargs)


def test_closed_form_exponents():
    assert omega_stretched(0.5, 1.0) == pytest.approx(1.0 / 9.0)
    assert omega_stretched(1.0, 1.0) == 1.0
    assert theta(10.0, 1.0) == pytest.approx(23.0 / 37.0)
    # the quadratic branch vanishes below r² = 4 + 2d + 2r
    assert theta(2.0, 1.0) == pytest.approx(2.5)
    th = 23.0 / 37.0
    assert omega_poly(10.0, 10.0, 1.0) == pytest.approx(1.0 / (3.0 * th + 2.0 * th * th))


@given(positive, positive)
def test_stretching_exponent_lies_in_unit_interval(delta, eps):
    omega = omega_stretched(delta, eps)
    assert 0.0 < omega <= 1.0
    if delta >= 1.0 and eps >= 1.0:
        assert omega == 1.0


@given(positive, positive, st.integers(min_value=1, max_value=6))
def test_polynomial_exponent_is_positive(p, q, d):
    omega = omega_poly(p, q, d)
    assert 0.0 < omega < 1.0 / min(theta(q, d), theta(p, d)) + 1e-12


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_exponents_reject_nonpositive_parameters(bad):
    with pytest.raises(ValidationError):
        omega_stretched(bad, 1.0)
    with pytest.raises(ValidationError):
        theta(bad, 1.0)


def test_profile_forms():
    assert WeakPoincareProfile.constant(0.5)(np.array([0.1]))[0] == 1.0
    power = WeakPoincareProfile.power(2.0, 1.0)
    np.testing.assert_allclose(power(np.array([0.1, 1.0, 4.0])), [20.0, 2.0, 1.0])
    logpower = WeakPoincareProfile.logpower(1.0, 2.0)
    np.testing.assert_allclose(
        logpower(np.array([math.exp(-3.0), math.exp(-0.5), 2.0])), [9.0, 1.0, 1.0]
    )
    custom = WeakPoincareProfile.custom(lambda u: -u)
    np.testing.assert_allclose(custom(np.array([0.5])), [2.0])
    np.testing.assert_allclose(custom.scaled(3.0)(np.array([0.5])), [6.0])
    np.testing.assert_allclose(power.scaled(0.5)(np.array([0.1])), [10.0])


@pytest.mark.parametrize(
    "args", [("power", 1.0, 0.0), ("logpower", 1.0, -1.0), ("constant", 0.0), ("spline",)]
)
def test_invalid_profiles(args):
    with pytest.raises(ValidationError):
        WeakPoincareProfile(*args)


def test_exponential_envelope_is_exact():
    envelope = _envelope("exponential", {}, c2=0.7)
    t = np.array([0.0, 0.5, 3.0, 40.0])
    np.testing.assert_allclose(envelope.xi(t), np.exp(-0.7 * t), rtol=1e-9)


def test_stretched_envelope_matches_closed_form():
    envelope = _envelope("stretched", {"delta": 0.5, "eps": 1.0}, c2=2.0)
    t = np.logspace(0, 12, 13)
    expected = np.exp(-((2.0 * t) ** (1.0 / 9.0)))
    np.testing.assert_allclose(envelope.xi(t), expected, rtol=1e-9)
    fit = fit_stretching_exponent(t, envelope.xi(t))
    assert fit.exponent == pytest.approx(1.0 / 9.0, rel=1e-6)


def test_polylog_envelope_exponent():
    envelope = _envelope("polylog", {"p": 10.0, "q": 10.0, "d": 1})
    t = np.logspace(12, 16, 9)
    fit = fit_power_exponent(t, envelope.xi(t))
    assert fit.exponent == pytest.approx(omega_poly(10.0, 10.0, 1.0), rel=0.05)


@given(st.floats(min_value=1e-3, max_value=1e6))
@settings(max_examples=30, deadline=None)
def test_envelope_is_a_decreasing_function_below_one(t):
    envelope = _envelope("stretched", {"delta": 0.7, "eps": 0.6})
    xi = envelope.xi(np.array([t, 2.0 * t]))
    assert 0.0 < xi[1] <= xi[0] <= 1.0


def test_xi_edge_cases():
    envelope = _envelope("exponential", {})
    assert envelope.xi(0.0) == 1.0
    with pytest.raises(ValidationError):
        envelope.xi(-1.0)
    assert np.isfinite(envelope.log_xi(1e300))


def test_log_inside_variant_decays_no_slower():
    profiles = preset_profiles("polylog", {"p": 10.0, "q": 10.0, "d": 1})
    outside = DecayEnvelope(*profiles)
    inside = DecayEnvelope(*profiles, log_inside=True)
    t = np.logspace(2, 8, 7)
    # α₂ is decreasing and r log(1/r) >= r for r <= 1/e
    assert np.all(inside.xi(t) <= outside.xi(t) * (1.0 + 1e-9))


def test_c_sigma_scales_the_second_profile():
    alpha1, alpha2 = preset_profiles("exponential", {}, c_sigma=4.0)
    assert alpha1.c == 1.0
    assert alpha2.c == 4.0


def test_envelope_constants_must_be_positive():
    alpha1, alpha2 = preset_profiles("exponential", {})
    with pytest.raises(ValidationError):
        DecayEnvelope(alpha1, alpha2, c1=0.0)


def test_reference_curves():
    t = np.array([0.0, 1.0, 10.0])
    np.testing.assert_allclose(reference_xi("exponential", {}, t), np.exp(-t))
    stretched = reference_xi("stretched", {"delta": 0.5, "eps": 1.0}, t)
    np.testing.assert_allclose(stretched, np.exp(-(t ** (1.0 / 9.0))))
    assert theoretical_exponent("exponential", {}) == 1.0
    with pytest.raises(ValidationError):
        reference_xi("gaussian", {}, t)


def test_fit_constants_recovers_exponential_data():
    envelope = _envelope("exponential", {})
    t = np.linspace(0.5, 10.0, 20)
    v = 2.0 * np.exp(-0.5 * t)
    fit = fit_constants((t, v, np.zeros_like(t)), envelope)
    assert fit.c2 == pytest.approx(0.5, rel=1e-5)
    assert fit.c1 == pytest.approx(2.0, rel=1e-5)
    assert fit.residual < 1e-6
    assert fit.violations == 0


def test_fit_constants_covers_confidence_bounds():
    envelope = _envelope("exponential", {})
    t = np.linspace(0.5, 10.0, 20)
    v = np.exp(-0.5 * t) * (1.0 + 0.2 * np.sin(3.0 * t))
    se = np.full_like(t, 1e-4)
    fit = fit_constants((t, v, se), envelope)
    assert fit.violations == 0
    assert count_violations(fit.envelope, t, v, se) == 0
    assert count_violations(fit.envelope.with_constants(c1=fit.c1 / 2.0), t, v, se) > 0


def test_fit_constants_needs_data():
    envelope = _envelope("exponential", {})
    t = np.arange(1.0, 11.0)
    with pytest.raises(ValidationError, match="identically zero"):
        fit_constants((t, np.zeros_like(t), np.zeros_like(t)), envelope)
    v = np.where(t < 4, 1.0, -1.0)
    with pytest.raises(ValidationError, match="at least"):
        fit_constants((t, v, np.zeros_like(t)), envelope)


@pytest.mark.parametrize(
    "model_name,family,params",
    [
        ("ou_model", "exponential", {}),
        ("bounded_sigma_model", "exponential", {}),
        ("stretched_model", "stretched", {"delta": 0.5, "eps": 1.0}),
    ],
)
def test_fit_constants_on_simulated_decay(request, model_name, family, params):
    model = request.getfixturevalue(model_name)
    f = tensor_function(functions.tanh([1.0]), functions.constant(1.0, 1))
    t_grid = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0]
    decay = estimate_decay(model, f, t_grid, 4000, 31, IntegratorConfig(h=0.01, horizon=3.0))
    fit = fit_constants(decay, _envelope(family, params))
    assert fit.violations == 0
    assert count_violations(fit.envelope, decay.t, decay.v_hat, decay.se) == 0
    assert np.isfinite(fit.c1) and fit.c1 > 0
    assert np.isfinite(fit.c2) and fit.c2 > 0


def test_exponent_fits_need_points():
    with pytest.raises(ValidationError):
        fit_power_exponent([1.0, 2.0], [1.0, 0.5])
    with pytest.raises(ValidationError):
        fit_stretching_exponent([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])


@pytest.mark.parametrize(
    "config,family",
    [
        ({"family": "stretched", "params": {"delta": 0.5, "eps": 1.0}}, "stretched"),
        ({"family": "polylog", "params": {"p": 10, "q": 10}, "d": 1}, "polylog"),
        ({"family": "exponential", "c2": 0.5}, "exponential"),
        (
            {
                "alpha1": {"form": "constant"},
                "alpha2": {"form": "power", "c": 1.0, "exponent": 0.5},
            },
            "custom",
        ),
    ],
)
def test_envelope_from_config(config, family):
    envelope, parsed_family, params = envelope_from_config(config)
    assert parsed_family == family
    assert isinstance(envelope, DecayEnvelope)
    assert 0.0 < envelope.xi(10.0) < 1.0


@pytest.mark.parametrize(
    "config,key_path",
    [
        ({"family": "stretched", "params": {"delta": 0.5}}, "envelope.params"),
        ({"family": "weibull"}, "envelope"),
        ({"alpha1": {"form": "constant"}}, "envelope"),
        ({"alpha1": {"form": "power"}, "alpha2": {"form": "constant"}}, "envelope.alpha1"),
        ({"family": "exponential", "shape": 1}, "envelope"),
        ({"family": "exponential", "c1": -1}, "envelope"),
        ({"family": "polylog", "params": {"p": 10, "q": 10}}, "envelope"),
    ],
)
def test_envelope_config_errors(config, key_path):
    with pytest.raises(ValidationError) as exc:
        envelope_from_config(config)
    assert exc.value.key_path == key_path


def test_xi_helpers():
    envelope = _envelope("exponential", {}, c2=0.7)
    assert xi_eval(envelope, 2.0) == pytest.approx(math.exp(-1.4), rel=1e-9)
    assert xi_log(envelope, 2.0) == pytest.approx(-1.4, rel=1e-9)
