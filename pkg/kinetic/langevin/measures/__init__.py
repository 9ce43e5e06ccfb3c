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
from kinetic.langevin.measures.gibbs import (
    DEFAULT_TAIL_TOL,
    GibbsMeasure,
    ProductMeasure,
    Quadrature,
    normalize,
    quadrature_table,
)
from kinetic.langevin.measures.integrability import LpCheck, check_lp_inequality
from kinetic.langevin.measures.sampling import as_generator

moment = GibbsMeasure.moment
sample = GibbsMeasure.sample
