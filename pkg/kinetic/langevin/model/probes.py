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
from scipy.stats import qmc

from kinetic.langevin.exceptions import ValidationError


@dataclass(frozen=True)
class ProbeSpec:
    """Deterministic low-discrepancy probe set on the cube [-radius, radius]^d"""

    radius: float = 10.0
    count: int = 4096

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError(f"probe radius must be positive, got {self.radius}")
        if self.count < 1:
            raise ValidationError(f"probe count must be positive, got {self.count}")

    @classmethod
    def from_config(cls, config, key_path="probes"):
        config = config or {}
        unknown = set(config) - {"radius", "count"}
        if unknown:
            raise ValidationError(f"unknown keys {sorted(unknown)}", key_path=key_path)
        try:
            return cls(
                radius=float(config.get("radius", cls.radius)),
                count=int(config.get("count", cls.count)),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(str(exc), key_path=key_path) from exc

    def points(self, dim, radius=None):
        radius = self.radius if radius is None else radius
        return halton_points(dim, self.count, radius)

    def ball(self, dim, radius=1.0):
        """Probes restricted to the closed ball of the given radius, origin included"""
        points = halton_points(dim, self.count, radius)
        points = points[np.linalg.norm(points, axis=-1) <= radius]
        return np.vstack([np.zeros((1, dim)), points])


def halton_points(dim, count, radius):
    # unscrambled so the probe set is identical on every run
    sampler = qmc.Halton(d=dim, scramble=False)
    unit = sampler.random(count)
    return qmc.scale(unit, -radius * np.ones(dim), radius * np.ones(dim))
