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
from kinetic.langevin.sde.ensemble import (
    DecayEstimate,
    EnsembleResult,
    estimate_decay,
    estimate_transition,
    martingale_residual,
    mean_and_se,
    quadratic_martingale_residual,
    run_ensemble,
    sample_starts,
    simulate_paths,
)
from kinetic.langevin.sde.integrator import IntegratorConfig, em_step, noise_factor
from kinetic.langevin.sde.oracle import LinearGaussianOracle
from kinetic.langevin.sde.streams import trajectory_stream
