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

from kinetic.langevin.exceptions import ValidationError


def _positive(**values):
    for name, value in values.items():
        if not value > 0 or not math.isfinite(value):
            raise ValidationError(f"{name} must be a positive finite number, got {value}")


def omega_stretched(delta, eps):
    """Stretching exponent δε / (δε + 8ε(1-δ)⁺ + 4δ(1-ε)⁺) of exp(-c t^ω)"""
    _positive(delta=delta, eps=eps)
    penalty = 8.0 * eps * max(1.0 - delta, 0.0) + 4.0 * delta * max(1.0 - eps, 0.0)
    return delta * eps / (delta * eps + penalty)


def theta(r, d):
    """(d + r + 2)/r ∧ (4r + 4 + 2d)/(r² - 4 - 2d - 2r)⁺, where a division by 0⁺ is +inf"""
    _positive(r=r, d=d)
    first = (d + r + 2.0) / r
    denominator = max(r * r - 4.0 - 2.0 * d - 2.0 * r, 0.0)
    second = (4.0 * r + 4.0 + 2.0 * d) / denominator if denominator > 0 else math.inf
    return min(first, second)


def omega_poly(p, q, d):
    """Polynomial decay exponent 1 / (2θ(q) + θ(p) + 2θ(q)θ(p))"""
    _positive(p=p, q=q, d=d)
    theta_p, theta_q = theta(p, d), theta(q, d)
    return 1.0 / (2.0 * theta_q + theta_p + 2.0 * theta_q * theta_p)


def reference_xi(family, params, t, c2=1.0):
    """Closed-form envelopes: exp(-c₂ t^ω) for ``stretched`` and
    c₂(1 + t)^{-ω} log(e + t)^ω for ``polylog``"""
    t = np.asarray(t, dtype=float)
    if family == "stretched":
        omega = omega_stretched(params["delta"], params["eps"])
        return np.exp(-c2 * t**omega)
    if family == "polylog":
        omega = omega_poly(params["p"], params["q"], params["d"])
        return c2 * (1.0 + t) ** (-omega) * np.log(math.e + t) ** omega
    if family == "exponential":
        return np.exp(-c2 * t)
    raise ValidationError(f"unknown envelope family '{family}'")


def theoretical_exponent(family, params):
    """ω of the family, or 1 for the exponential family"""
    if family == "stretched":
        return omega_stretched(params["delta"], params["eps"])
    if family == "polylog":
        return omega_poly(params["p"], params["q"], params["d"])
    if family == "exponential":
        return 1.0
    raise ValidationError(f"unknown envelope family '{family}'")
