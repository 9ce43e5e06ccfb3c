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
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.rates.exponents import theta

LOG = logging.getLogger("kinetic-langevin")

CONSTANT = "constant"
POWER = "power"
LOGPOWER = "logpower"
CUSTOM = "custom"
FORMS = (CONSTANT, POWER, LOGPOWER, CUSTOM)

LOG_TINY = math.log(np.finfo(float).tiny)
SCAN_POINTS = 4096
U_TOL = 1e-11


@dataclass(frozen=True)
class WeakPoincareProfile:
    """A decreasing profile α: (0, ∞) -> [1, ∞) in closed form

    ``constant``: α(r) = max(1, c); ``power``: α(r) = max(1, c r^{-a});
    ``logpower``: α(r) = max(1, c log(1/r)^k) with log(1/r) taken as 0 for r >= 1.
    A ``custom`` profile wraps a callable of log r returning log α(r).
    """

    form: str
    c: float = 1.0
    exponent: float = 0.0
    log_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.form not in FORMS:
            raise ValidationError(f"unknown profile form '{self.form}', expected one of {FORMS}")
        if self.form == CUSTOM:
            if self.log_fn is None:
                raise ValidationError("custom profiles need a log_fn")
            return
        if not self.c > 0 or not math.isfinite(self.c):
            raise ValidationError(f"profile constant must be positive, got {self.c}")
        if self.form == POWER and not self.exponent > 0:
            raise ValidationError(f"power profile needs exponent > 0, got {self.exponent}")
        if self.form == LOGPOWER and not self.exponent >= 0:
            raise ValidationError(f"logpower profile needs exponent >= 0, got {self.exponent}")

    @classmethod
    def constant(cls, c=1.0):
        return cls(CONSTANT, c)

    @classmethod
    def power(cls, c, exponent):
        return cls(POWER, c, exponent)

    @classmethod
    def logpower(cls, c, exponent):
        return cls(LOGPOWER, c, exponent)

    @classmethod
    def custom(cls, log_fn):
        return cls(CUSTOM, log_fn=log_fn)

    def scaled(self, factor):
        """The profile multiplied by ``factor`` before flooring"""
        if self.form == CUSTOM:
            log_fn, shift = self.log_fn, math.log(factor)
            return replace(self, log_fn=lambda u: np.asarray(log_fn(u)) + shift)
        return replace(self, c=self.c * factor)

    def log_value(self, log_r):
        """log α(r) as a function of u = log r, vectorized"""
        u = np.asarray(log_r, dtype=float)
        if self.form == CONSTANT:
            raw = np.full_like(u, math.log(self.c))
        elif self.form == POWER:
            raw = math.log(self.c) - self.exponent * u
        elif self.form == LOGPOWER:
            with np.errstate(divide="ignore"):
                raw = np.where(
                    u < 0,
                    math.log(self.c) + self.exponent * np.log(np.maximum(-u, 0.0)),
                    -np.inf,
                )
            if self.exponent == 0:
                raw = np.full_like(u, math.log(self.c))
        else:
            raw = np.asarray(self.log_fn(u), dtype=float)
        return np.maximum(raw, 0.0)

    def __call__(self, r):
        return np.exp(self.log_value(np.log(r)))

    def to_config(self):
        return {"form": self.form, "c": self.c, "exponent": self.exponent}

    @classmethod
    def from_config(cls, config, key_path=""):
        if not isinstance(config, dict):
            raise ValidationError("profile must be a mapping", key_path=key_path)
        try:
            return cls(
                config.get("form"), float(config.get("c", 1.0)), float(config.get("exponent", 0.0))
            )
        except ValidationError as exc:
            raise ValidationError(str(exc), key_path=key_path) from exc


@dataclass(frozen=True)
class DecayEnvelope:
    """ξ(t) = inf{r > 0 : c₂t >= α₁(r)² α₂(r/α₁(r)²) log(1/r)}

    With ``log_inside`` the logarithm moves into the argument of α₂,
    α₁(r)² α₂(r log(1/r)/α₁(r)²).
    """

    alpha1: WeakPoincareProfile
    alpha2: WeakPoincareProfile
    c1: float = 1.0
    c2: float = 1.0
    log_inside: bool = False

    def __post_init__(self):
        for name in ("c1", "c2"):
            value = getattr(self, name)
            if not value > 0 or not math.isfinite(value):
                raise ValidationError(f"{name} must be a positive finite number, got {value}")

    def with_constants(self, c1=None, c2=None):
        return replace(self, c1=self.c1 if c1 is None else c1, c2=self.c2 if c2 is None else c2)

    def log_h(self, log_r):
        """log of the threshold function h at u = log r < 0"""
        u = np.asarray(log_r, dtype=float)
        log_a1 = self.alpha1.log_value(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_log = np.log(-u)
        if self.log_inside:
            return 2.0 * log_a1 + self.alpha2.log_value(u + log_log - 2.0 * log_a1)
        return 2.0 * log_a1 + self.alpha2.log_value(u - 2.0 * log_a1) + log_log

    def h(self, r):
        return np.exp(self.log_h(np.log(r)))

    def log_xi(self, t):
        """log ξ(t) for scalar or array ``t``"""
        t = np.asarray(t, dtype=float)
        out = np.array([_log_xi_scalar(self, float(s)) for s in t.ravel()])
        return out.reshape(t.shape) if t.ndim else float(out[0])

    def xi(self, t):
        return np.exp(self.log_xi(t))

    def bound(self, t, scale=1.0):
        """c₁ ξ(t) scale, the right-hand side of the decay estimate"""
        return self.c1 * self.xi(t) * scale


def _log_xi_scalar(envelope, t):
    if t < 0:
        raise ValidationError(f"t must be nonnegative, got {t}")
    if t == 0:
        return 0.0
    target = math.log(envelope.c2 * t)
    if math.isinf(target):
        return 0.0 if target < 0 else LOG_TINY

    # scan for the first admissible u, then bisect the bracket
    grid = np.linspace(LOG_TINY, 0.0, SCAN_POINTS)[:-1]
    admissible = envelope.log_h(grid) <= target
    if not np.any(admissible):
        return 0.0
    first = int(np.argmax(admissible))
    if first == 0:
        return LOG_TINY
    lo, hi = grid[first - 1], grid[first]
    iterations = 0
    while hi - lo > U_TOL:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if envelope.log_h(mid) <= target:
            hi = mid
        else:
            lo = mid
        iterations += 1
    LOG.debug("xi(%g) bracketed in %d bisection steps", t, iterations)
    return float(hi)


def xi_eval(envelope, t):
    """ξ(t) in (0, 1]; 1 when no r < 1 satisfies the constraint"""
    return envelope.xi(t)


def xi_log(envelope, t):
    return envelope.log_xi(t)


STRETCHED = "stretched"
POLYLOG = "polylog"
EXPONENTIAL = "exponential"
PRESETS = (STRETCHED, POLYLOG, EXPONENTIAL)


def preset_profiles(family, params, d=None, c_sigma=1.0):
    """The (α₁, α₂) pair matching a closed-form rate shape

    ``stretched`` (δ, ε): α₁ = max(1, log(1/r)^{4(1-δ)⁺/δ}), α₂ = max(1, log(1/r)^{4(1-ε)⁺/ε});
    ``polylog`` (p, q, d): α₁ = max(1, r^{-θ(q)}), α₂ = max(1, r^{-θ(p)});
    ``exponential``: both constant. α₂ is scaled by the ellipticity constant c_Σ.
    """
    params = dict(params or {})
    if family == STRETCHED:
        delta, eps = float(params["delta"]), float(params["eps"])
        if not delta > 0 or not eps > 0:
            raise ValidationError(f"stretched needs delta, eps > 0, got {delta}, {eps}")
        alpha1 = WeakPoincareProfile.logpower(1.0, 4.0 * max(1.0 - delta, 0.0) / delta)
        alpha2 = WeakPoincareProfile.logpower(1.0, 4.0 * max(1.0 - eps, 0.0) / eps)
    elif family == POLYLOG:
        dim = d if d is not None else params.get("d")
        if dim is None:
            raise ValidationError("polylog profiles need the dimension d")
        alpha1 = WeakPoincareProfile.power(1.0, theta(float(params["q"]), dim))
        alpha2 = WeakPoincareProfile.power(1.0, theta(float(params["p"]), dim))
    elif family == EXPONENTIAL:
        alpha1 = WeakPoincareProfile.constant(float(params.get("c1_profile", 1.0)))
        alpha2 = WeakPoincareProfile.constant(float(params.get("c2_profile", 1.0)))
    else:
        raise ValidationError(f"unknown preset family '{family}', expected one of {PRESETS}")
    if c_sigma != 1.0:
        alpha2 = alpha2.scaled(c_sigma)
    return alpha1, alpha2


ENVELOPE_KEYS = {"family", "params", "d", "c_sigma", "log_inside", "c1", "c2", "alpha1", "alpha2"}


def envelope_from_config(config, key_path="envelope"):
    """Build a :class:`DecayEnvelope` from a preset family or explicit profiles

    ``{"family": "stretched", "params": {"delta": 0.5, "eps": 1}}`` selects a preset;
    ``{"alpha1": {...}, "alpha2": {...}}`` gives the two profiles directly, with
    ``family`` then defaulting to ``custom``.
    """
    if not isinstance(config, dict):
        raise ValidationError("envelope must be a mapping", key_path=key_path)
    unknown = set(config) - ENVELOPE_KEYS
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", key_path=key_path)

    family = config.get("family", CUSTOM)
    params = dict(config.get("params") or {})
    try:
        if family in PRESETS:
            if family == POLYLOG and "d" in config:
                params.setdefault("d", config["d"])
            alpha1, alpha2 = preset_profiles(
                family, params, d=config.get("d"), c_sigma=float(config.get("c_sigma", 1.0))
            )
        elif family == CUSTOM:
            if "alpha1" not in config or "alpha2" not in config:
                raise ValidationError("explicit envelopes need both alpha1 and alpha2")
            alpha1 = WeakPoincareProfile.from_config(config["alpha1"], f"{key_path}.alpha1")
            alpha2 = WeakPoincareProfile.from_config(config["alpha2"], f"{key_path}.alpha2")
        else:
            raise ValidationError(
                f"unknown family '{family}', expected one of {PRESETS + (CUSTOM,)}"
            )
        envelope = DecayEnvelope(
            alpha1,
            alpha2,
            c1=float(config.get("c1", 1.0)),
            c2=float(config.get("c2", 1.0)),
            log_inside=bool(config.get("log_inside", False)),
        )
    except KeyError as exc:
        raise ValidationError(f"missing parameter {exc}", key_path=f"{key_path}.params") from exc
    except ValidationError as exc:
        if exc.key_path:
            raise
        raise ValidationError(exc.message, key_path=key_path) from exc
    return envelope, family, params
