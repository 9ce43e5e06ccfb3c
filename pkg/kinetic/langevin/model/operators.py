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
from dataclasses import dataclass

import numpy as np

from kinetic.langevin.exceptions import NumericalError, ValidationError
from kinetic.langevin.measures.gibbs import GibbsMeasure
from kinetic.langevin.model.conditions import RADIAL_TOL


def _check_dims(model, f):
    if (f.d1, f.d2) != (model.d1, model.d2):
        raise ValidationError(
            f"test function acts on dimensions {(f.d1, f.d2)}, "
            f"model has {(model.d1, model.d2)}"
        )


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _matvec(m, v):
    return np.einsum("...ij,...j->...i", m, v)


def diffusion_gradient(model, y):
    """∂_k a_ij(y) as an array (..., d2, d2, d2), NumericalError when unavailable"""
    if model.sigma.gradient is None:
        raise NumericalError("diffusion gradient unavailable")
    grads = np.asarray(model.sigma.gradient(y), dtype=float)
    if not np.all(np.isfinite(grads)):
        raise NumericalError("diffusion gradient unavailable")
    return grads


def drift_b(model, y):
    """b_i(y) = Σ_j ∂_j a_ij(y) - a_ij(y) ∂_j Ψ(y), vectorized over the leading axes of y"""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != model.d2:
        raise ValidationError(f"y must have trailing dimension {model.d2}, got {y.shape}")
    divergence = np.einsum("...ijj->...i", diffusion_gradient(model, y))
    return divergence - _matvec(model.sigma.matrix(y), model.psi.gradient(y))


def apply_L(model, f, x, y):
    """Lf = tr[Σ H_y f] + ⟨b, ∇_y f⟩ + ⟨Q∇Ψ, ∇_x f⟩ - ⟨Qᵀ∇Φ, ∇_y f⟩"""
    _check_dims(model, f)
    grad_y = f.grad_y(x, y)
    trace = np.einsum("...ij,...ji->...", model.sigma.matrix(y), f.hessian_y(x, y))
    return (
        trace
        + _dot(drift_b(model, y), grad_y)
        + _dot(model.psi.gradient(y) @ model.Q.T, f.grad_x(x, y))
        - _dot(model.phi.gradient(x) @ model.Q, grad_y)
    )


def apply_S(model, f, x, y):
    """Symmetric part Sf = Σ a_ij ∂_i∂_j f + Σ b_i ∂_i f (acting in y only)"""
    _check_dims(model, f)
    trace = np.einsum("...ij,...ji->...", model.sigma.matrix(y), f.hessian_y(x, y))
    return trace + _dot(drift_b(model, y), f.grad_y(x, y))


def apply_A(model, f, x, y):
    """Antisymmetric part Af = Qᵀ∇Φ·∇_y f - Q∇Ψ·∇_x f"""
    _check_dims(model, f)
    transport_y = _dot(model.phi.gradient(x) @ model.Q, f.grad_y(x, y))
    transport_x = _dot(model.psi.gradient(y) @ model.Q.T, f.grad_x(x, y))
    return transport_y - transport_x


def carre_du_champ(model, f, x, y):
    """Γ(f) = ½(L(f²) - 2fLf) = ⟨∇_y f, Σ∇_y f⟩"""
    _check_dims(model, f)
    grad_y = f.grad_y(x, y)
    return _dot(grad_y, _matvec(model.sigma.matrix(y), grad_y))


def gradient_form(model, f, g, x, y):
    """Integrand of -⟨∇f, [[0, -Q], [Qᵀ, Σ]]∇g⟩, whose μ-integral equals (Lf, g)_μ"""
    _check_dims(model, f)
    _check_dims(model, g)
    fx, fy = f.grad_x(x, y), f.grad_y(x, y)
    gx, gy = g.grad_x(x, y), g.grad_y(x, y)
    return (
        _dot(fx, gy @ model.Q.T)
        - _dot(fy, gx @ model.Q)
        - _dot(fy, _matvec(model.sigma.matrix(y), gy))
    )


def y_measure(model, measure=None):
    """μ₂ for the model, built on demand"""
    if measure is None:
        return GibbsMeasure.from_potential(model.psi)
    if measure.dim != model.d2:
        raise ValidationError(f"measure has dimension {measure.dim}, expected {model.d2}")
    return measure


def _average_y(fn, x, measure):
    # ∫ fn(x, y) μ₂(dy) for fn returning (..., n_nodes, *trailing)
    x = np.asarray(x, dtype=float)
    values = fn(x[..., None, :], measure.nodes)
    axis = x.ndim - 1
    return np.tensordot(np.moveaxis(values, axis, -1), measure.weights, axes=([-1], [0]))


def apply_P(model, f, x, measure=None):
    """Pf(x) = ∫ f(x, y) μ₂(dy) by the quadrature of μ₂"""
    _check_dims(model, f)
    measure = y_measure(model, measure)
    return _average_y(f.value, x, measure)


def _projected_derivatives(model, f, x, measure):
    if f.hessian_x is None:
        raise ValidationError("test function has no hessian_x, needed for G")
    grad = _average_y(f.grad_x, x, measure)
    hess = _average_y(f.hessian_x, x, measure)
    return grad, hess


def apply_G(model, f, x, measure=None):
    """Gf = (μ₂(|∇Ψ|²)/d₂) Σ (QQᵀ)_ij (∂_j∂_i - ∂_jΦ ∂_i) Pf

    Valid for radial Ψ, where PAAP reduces to this closed form; other Ψ are rejected on the
    quadrature nodes of μ₂ and belong to :func:`apply_paap`.
    """
    _check_dims(model, f)
    measure = y_measure(model, measure)
    deviation = model.psi.radial_deviation(measure.nodes)
    if deviation.size and deviation.max() > RADIAL_TOL:
        raise ValidationError(
            f"apply_G needs a radial Ψ, deviation {deviation.max():.3e} on the μ₂ nodes; "
            "use apply_paap"
        )
    x = np.asarray(x, dtype=float)
    grad, hess = _projected_derivatives(model, f, x, measure)
    scale = measure.moment(lambda y: _dot(model.psi.gradient(y), model.psi.gradient(y)))
    gram = model.coupling_gram
    second = np.einsum("ij,...ji->...", gram, hess)
    first = _dot(model.phi.gradient(x), _matvec(gram, grad))
    return scale / model.d2 * (second - first)


def apply_paap(model, f, x, measure=None):
    """P A A P f from the moments μ₂(∇Ψ∇Ψᵀ) and μ₂(∇²Ψ)

    Does not assume a radial Ψ; agrees with :func:`apply_G` when Ψ is radial.
    """
    _check_dims(model, f)
    measure = y_measure(model, measure)
    x = np.asarray(x, dtype=float)
    grad, hess = _projected_derivatives(model, f, x, measure)

    def outer(y):
        g = model.psi.gradient(y)
        return g[..., :, None] * g[..., None, :]

    second_moment = measure.moment(outer)
    hessian_mean = measure.moment(model.psi.hessian)
    q = model.Q
    second = np.einsum("ji,...jk,kl,li->...", q, hess, q, second_moment)
    first = _dot(model.phi.gradient(x), _matvec(q @ hessian_mean @ q.T, grad))
    return second - first


@dataclass(frozen=True)
class FormIdentities:
    """Residuals of the bilinear identities of L in L²(μ)

    Each residual is an absolute value; ``scale`` is the magnitude of the largest form
    entering it, so ``residual / scale`` is the relative quadrature error.
    """

    antisymmetry: float
    symmetry: float
    dirichlet: float
    gradient_form: float
    invariance: float
    dissipation: float
    scale: float

    def max_relative(self):
        residuals = (
            self.antisymmetry,
            self.symmetry,
            self.dirichlet,
            self.gradient_form,
            self.invariance,
        )
        return max(residuals) / self.scale

    @property
    def dissipative(self):
        return self.dissipation <= self.scale * 1e-10


def form_identities(model, f, g, product):
    """Evaluate (Af, g) + (f, Ag), (Sf, g) - (f, Sg), (Sf, f) + ∫Γ(f), the gradient form
    of (Lf, g) and (Lf, 1) on the quadrature of ``product``
    """
    _check_dims(model, f)
    _check_dims(model, g)

    def form(op_f, h):
        return product.integrate(lambda x, y: op_f(x, y) * h(x, y))

    def op(fn, func):
        return lambda x, y: fn(model, func, x, y)

    af_g = form(op(apply_A, f), g.value)
    f_ag = form(op(apply_A, g), f.value)
    sf_g = form(op(apply_S, f), g.value)
    f_sg = form(op(apply_S, g), f.value)
    sf_f = form(op(apply_S, f), f.value)
    gamma = product.integrate(op(carre_du_champ, f))
    lf_g = form(op(apply_L, f), g.value)
    grad = product.integrate(lambda x, y: gradient_form(model, f, g, x, y))
    lf_one = product.integrate(op(apply_L, f))

    scale = max(1.0, abs(af_g), abs(f_ag), abs(sf_g), abs(f_sg), abs(sf_f), abs(lf_g), gamma)
    return FormIdentities(
        antisymmetry=abs(af_g + f_ag),
        symmetry=abs(sf_g - f_sg),
        dirichlet=abs(sf_f + gamma),
        gradient_form=abs(lf_g - grad),
        invariance=abs(lf_one),
        dissipation=sf_f,
        scale=scale,
    )
