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
from kinetic.langevin.model.conditions import (
    CONDITION_IDS,
    ConditionEntry,
    ConditionReport,
    validate_conditions,
)
from kinetic.langevin.model.derivatives import (
    DerivativeCheck,
    check_gradient,
    check_hessian,
    check_potential,
    check_test_function,
)
from kinetic.langevin.model.diffusion import DiffusionField
from kinetic.langevin.model.functions import SpaceFunction, TestFunction
from kinetic.langevin.model.operators import (
    apply_A,
    apply_G,
    apply_L,
    apply_P,
    apply_S,
    apply_paap,
    carre_du_champ,
    FormIdentities,
    drift_b,
    form_identities,
    gradient_form,
)
from kinetic.langevin.model.potentials import PotentialMetadata, PotentialSpec
from kinetic.langevin.model.probes import ProbeSpec
from kinetic.langevin.model.spec import CoefficientConstants, ModelSpec, coefficient_constants
from kinetic.langevin.model.transforms import QuadraticTransform, normalize_quadratic
