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
from scipy import optimize, stats

from kinetic.langevin.exceptions import ValidationError

LOG = logging.getLogger("kinetic-langevin")

MIN_POINTS = 5
CONFIDENCE_SE = 3.0
LOG_C2_BOUNDS = (-25.0, 25.0)


@dataclass(frozen=True)
class EnvelopeFit:
    """Fitted constants of a decay envelope against variance data"""

    envelope: object
    c1: float
    c2: float
    residual: float
    violations: int
    scale: float = 1.0


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    stderr: float
    intercept: float
    points: int


def _decay_arrays(decay):
    if hasattr(decay, "v_hat"):
        t, v, se = decay.t, decay.v_hat, decay.se
    else:
        t, v, se = decay
    return np.asarray(t, float), np.asarray(v, float), np.asarray(se, float)


def lower_confidence_bounds(v, se, width=CONFIDENCE_SE):
    return np.asarray(v, float) - width * np.asarray(se, float)


def count_violations(envelope, t, v, se, scale=1.0):
    """Number of times whose lower confidence bound exceeds c₁ξ(t)·scale"""
    bound = envelope.bound(np.asarray(t, float), scale)
    lcb = lower_confidence_bounds(v, se)
    return int(np.sum(lcb > bound * (1.0 + 1e-12)))


def fit_constants(decay, envelope, scale=1.0):
    """Fit c₁, c₂ of ``envelope`` to variance estimates on log scale

    c₂ minimizes the squared log residual with c₁ profiled out; c₁ is then raised until the
    envelope c₁ξ(t)·scale upper-bounds every lower confidence bound v̂ - 3·SE.

    Parameters
    ----------
    decay: DecayEstimate or tuple
        Anything with ``t``, ``v_hat`` and ``se`` (or a ``(t, v, se)`` tuple)
    envelope: DecayEnvelope
        Shape of the envelope, its c₁ and c₂ are ignored
    scale: float
        ‖f‖²_osc or another fixed factor in front of ξ
    """
    t, v, se = _decay_arrays(decay)
    if not np.any(v > 0):
        raise ValidationError("decay data is identically zero, nothing to fit")
    usable = (v > 0) & np.isfinite(v)
    if usable.sum() < MIN_POINTS:
        raise ValidationError(
            f"need at least {MIN_POINTS} positive estimates to fit, got {int(usable.sum())}"
        )
    log_v = np.log(v[usable] / scale)
    t_fit = t[usable]

    def profile(log_c2):
        log_xi = envelope.with_constants(c2=math.exp(log_c2)).log_xi(t_fit)
        log_c1 = float(np.mean(log_v - log_xi))
        return log_c1, log_v - log_c1 - log_xi

    def objective(log_c2):
        _, residual = profile(log_c2)
        return float(np.dot(residual, residual))

    result = optimize.minimize_scalar(
        objective, bounds=LOG_C2_BOUNDS, method="bounded", options={"xatol": 1e-8}
    )
    log_c1, residual = profile(result.x)
    c2 = math.exp(result.x)
    c1 = math.exp(log_c1)

    fitted = envelope.with_constants(c1=c1, c2=c2)
    lcb = lower_confidence_bounds(v, se)
    positive = lcb > 0
    if np.any(positive):
        xi = fitted.xi(t[positive])
        needed = float(np.max(lcb[positive] / (xi * scale)))
        if needed > c1:
            LOG.debug("Raising c1 from %.6g to %.6g to cover confidence bounds", c1, needed)
            c1 = needed * (1.0 + 1e-9)
    fitted = fitted.with_constants(c1=c1)
    violations = count_violations(fitted, t, v, se, scale)
    rms = float(math.sqrt(np.mean(residual**2)))
    return EnvelopeFit(fitted, c1, c2, rms, violations, scale)


def fit_stretching_exponent(t, v, c1=1.0):
    """ω and its standard error from the regression of log log(c₁/v) on log t"""
    t, v = np.asarray(t, float), np.asarray(v, float) / c1
    usable = (t > 0) & (v > 0) & (v < 1)
    if usable.sum() < 3:
        raise ValidationError("need at least three points with 0 < v/c1 < 1 and t > 0")
    fit = stats.linregress(np.log(t[usable]), np.log(-np.log(v[usable])))
    return ExponentFit(float(fit.slope), float(fit.stderr), float(fit.intercept), int(usable.sum()))


def fit_power_exponent(t, v):
    """Decay exponent ω of v ~ t^{-ω} from the log-log slope, with its standard error"""
    t, v = np.asarray(t, float), np.asarray(v, float)
    usable = (t > 0) & (v > 0)
    if usable.sum() < 3:
        raise ValidationError("need at least three points with t > 0 and v > 0")
    fit = stats.linregress(np.log(t[usable]), np.log(v[usable]))
    count = int(usable.sum())
    return ExponentFit(float(-fit.slope), float(fit.stderr), float(fit.intercept), count)
