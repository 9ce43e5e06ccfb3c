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
import pandas as pd

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.rates.envelope import POLYLOG, PRESETS
from kinetic.langevin.rates.exponents import theoretical_exponent
from kinetic.langevin.rates.fitting import (
    fit_constants,
    fit_power_exponent,
    fit_stretching_exponent,
    lower_confidence_bounds,
)

LOG = logging.getLogger("kinetic-langevin")


@dataclass(frozen=True)
class ComparisonReport:
    """Audit of variance decay data against a fitted envelope c₁ξ(t)·scale"""

    source: str
    family: str
    c1: float
    c2: float
    scale: float
    table: pd.DataFrame
    violations: int
    fitted_exponent: float
    exponent_se: float
    theoretical_exponent: float

    @property
    def valid(self):
        return self.violations == 0

    @property
    def exponent_gap(self):
        """|fitted - theoretical| in units of the fit's standard error"""
        if not (math.isfinite(self.fitted_exponent) and math.isfinite(self.theoretical_exponent)):
            return math.nan
        gap = abs(self.fitted_exponent - self.theoretical_exponent)
        return gap / self.exponent_se if self.exponent_se > 0 else math.inf

    def summary(self):
        return {
            "source": self.source,
            "family": self.family,
            "c1": self.c1,
            "c2": self.c2,
            "scale": self.scale,
            "violations": self.violations,
            "fitted_exponent": self.fitted_exponent,
            "exponent_se": self.exponent_se,
            "theoretical_exponent": self.theoretical_exponent,
        }


def _fit_exponent(family, t, v, c1, scale):
    try:
        if family == POLYLOG:
            fit = fit_power_exponent(t, v)
        else:
            fit = fit_stretching_exponent(t, v / scale, c1)
    except ValidationError as exc:
        LOG.warning("Exponent fit skipped: %s", exc)
        return math.nan, math.nan
    return fit.exponent, fit.stderr


def compare(decay, envelope, family, params, scale, source="mc"):
    """Fit ``envelope`` to ``decay`` and tabulate the margin at every time

    The margin is c₁ξ(t)·scale - (v̂(t) - 3·SE); a negative margin is a violation.
    """
    if not scale > 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    fit = fit_constants(decay, envelope, scale=scale)
    t, v, se = (np.asarray(a, dtype=float) for a in (decay.t, decay.v_hat, decay.se))
    bound = fit.envelope.bound(t, scale)
    lcb = lower_confidence_bounds(v, se)
    table = pd.DataFrame(
        {"t": t, "v_hat": v, "se": se, "lcb": lcb, "bound": bound, "margin": bound - lcb}
    )

    exponent, stderr = _fit_exponent(family, t, v, fit.c1, scale)
    theory = math.nan
    if family in PRESETS:
        theory = theoretical_exponent(family, params)
    LOG.debug("Fitted exponent %.4g ± %.2g (theory %.4g)", exponent, stderr, theory)
    return ComparisonReport(
        source=source,
        family=family,
        c1=fit.c1,
        c2=fit.c2,
        scale=scale,
        table=table,
        violations=fit.violations,
        fitted_exponent=exponent,
        exponent_se=stderr,
        theoretical_exponent=theory,
    )
