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
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.measures.gibbs import GibbsMeasure


@dataclass(frozen=True)
class LpCheck:
    """Both sides of ∫|∇V|^{2k} g^{2k} dμ_V <= C_k (∫ g^{2k} dμ_V + ∫ |∇g|^{2k} dμ_V)

    ``passed`` is ``None`` when no closed-form constant is available and ``C_k`` is the
    empirical ratio lhs / rhs instead.
    """

    k: int
    lhs: float
    rhs_terms: Tuple[float, float]
    C_k: float
    passed: Optional[bool]
    K: float
    alpha: float

    @property
    def rhs(self):
        return self.C_k * sum(self.rhs_terms)

    @property
    def margin(self):
        return self.rhs - self.lhs


def hessian_growth_constant(potential, nodes, alpha):
    """Smallest K with |∇²V| <= K(1 + |∇V|^alpha) on ``nodes`` (Frobenius norm)"""
    hess = np.linalg.norm(potential.hessian(nodes), axis=(-2, -1))
    grad = np.linalg.norm(potential.gradient(nodes), axis=-1)
    return float(np.max(hess / (1.0 + grad**alpha)))


def proof_constant(dim, K):
    """max(4(√d K + d K² + d² K⁴), 16)"""
    return max(4.0 * (math.sqrt(dim) * K + dim * K**2 + dim**2 * K**4), 16.0)


def check_lp_inequality(potential, g, k=1, measure=None, K=None, alpha=None):
    """Evaluate the weighted integrability inequality for ``potential`` and ``g``

    Parameters
    ----------
    potential: PotentialSpec
        V, with Hessian growth |∇²V| <= K(1 + |∇V|^alpha) for some alpha in [1, 2)
    g: SpaceFunction
        The weight function, evaluated with its analytic gradient
    k: int
        Power index, the integrands carry exponent 2k
    measure: GibbsMeasure, optional
        μ_V, built from the potential when not supplied
    K, alpha: float, optional
        Growth constants; the potential's metadata is used next and K is finally
        estimated over the quadrature nodes
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k}")
    if g.dim != potential.dim:
        raise ValidationError(f"g has dimension {g.dim}, potential has {potential.dim}")
    alpha = alpha if alpha is not None else potential.metadata.alpha
    alpha = 1.0 if alpha is None else float(alpha)
    if not 1.0 <= alpha < 2.0:
        raise ValidationError(f"alpha must lie in [1, 2), got {alpha}")
    measure = measure or GibbsMeasure.from_potential(potential)

    if K is None:
        K = potential.metadata.K
    if K is None:
        K = hessian_growth_constant(potential, measure.nodes, alpha)

    power = 2 * k

    def lhs_integrand(z):
        grad = np.linalg.norm(potential.gradient(z), axis=-1)
        return grad**power * g.value(z) ** power

    lhs = measure.moment(lhs_integrand)
    g_term = measure.moment(lambda z: g.value(z) ** power)
    grad_term = measure.moment(lambda z: np.linalg.norm(g.gradient(z), axis=-1) ** power)
    rhs_sum = g_term + grad_term

    if k == 1 and 2.0 * (alpha - 1.0) <= 1.0:
        constant = proof_constant(potential.dim, K)
        passed = bool(lhs <= constant * rhs_sum * (1.0 + 1e-12))
    else:
        constant = lhs / rhs_sum if rhs_sum > 0 else math.inf if lhs > 0 else 0.0
        passed = None
    return LpCheck(k, lhs, (g_term, grad_term), constant, passed, K, alpha)
