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
# flake8: noqa
from kinetic.langevin.rates.envelope import (
    PRESETS,
    DecayEnvelope,
    WeakPoincareProfile,
    envelope_from_config,
    preset_profiles,
    xi_eval,
    xi_log,
)
from kinetic.langevin.rates.exponents import (
    omega_poly,
    omega_stretched,
    reference_xi,
    theoretical_exponent,
    theta,
)
from kinetic.langevin.rates.fitting import (
    EnvelopeFit,
    ExponentFit,
    count_violations,
    fit_constants,
    fit_power_exponent,
    fit_stretching_exponent,
)
