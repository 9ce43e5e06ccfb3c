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
import json
import pathlib
from dataclasses import dataclass, field, replace
from typing import Any, Optional

import numpy as np

from kinetic.langevin.exceptions import ValidationError
from kinetic.langevin.model.functions import TestFunction
from kinetic.langevin.model.probes import ProbeSpec
from kinetic.langevin.model.spec import ModelSpec
from kinetic.langevin.sde.integrator import IntegratorConfig

COMMANDS = ("validate", "rate", "simulate", "decay", "fpsolve", "compare")
TOP_LEVEL_KEYS = {
    "command",
    "seed",
    "output_dir",
    "model",
    "test_function",
    "integrator",
    "decay",
    "simulate",
    "grid",
    "envelope",
    "rate",
    "probes",
}
NEEDS_MODEL = {"validate", "simulate", "decay", "fpsolve", "compare"}
NEEDS_TEST_FUNCTION = {"decay", "fpsolve", "compare"}

SECTION_DEFAULTS = {
    "decay": {"t_grid": None, "n_outer": 10_000, "source": "mc"},
    "simulate": {"t_grid": None, "n_paths": 16, "start": "stationary"},
    "grid": {
        "R": None,
        "n_x": 257,
        "n_y": 257,
        "dt": 1e-3,
        "t_grid": None,
        "density0": None,
        "snapshots": False,
        "spectrum": False,
    },
    "rate": {"t_grid": None},
}
DECAY_SOURCES = ("mc", "grid")


def parse_t_grid(values, key_path):
    """A nonempty, nonnegative, strictly increasing time grid"""
    try:
        t_grid = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"not a numeric sequence: {exc}", key_path=key_path) from exc
    if t_grid.ndim != 1 or len(t_grid) == 0:
        raise ValidationError("must be a nonempty list of times", key_path=key_path)
    if not np.all(np.isfinite(t_grid)) or np.any(t_grid < 0):
        raise ValidationError("times must be finite and nonnegative", key_path=key_path)
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("times must be strictly increasing", key_path=key_path)
    return t_grid


def _section(raw, name):
    value = raw.get(name) or {}
    if not isinstance(value, dict):
        raise ValidationError("must be a mapping", key_path=name)
    defaults = SECTION_DEFAULTS[name]
    unknown = set(value) - set(defaults)
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", key_path=name)
    return {**defaults, **value}


def _positive_int(value, key_path, minimum=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"must be an integer >= {minimum}, got {value!r}", key_path=key_path)
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated run description read from one JSON file

    ``raw`` keeps the configuration as written so the manifest can reproduce the run.
    """

    command: str
    seed: int
    output_dir: pathlib.Path
    raw: dict
    model: Optional[ModelSpec] = None
    test_function: Optional[TestFunction] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    probes: ProbeSpec = field(default_factory=ProbeSpec)
    sections: dict = field(default_factory=dict)
    envelope: Optional[dict] = None

    def section(self, name) -> Any:
        return self.sections[name]

    def with_workers(self, workers):
        if workers is None:
            return self
        return replace(self, integrator=replace(self.integrator, workers=workers))

    @classmethod
    def from_file(cls, path, command=None):
        """Read a JSON config; ``command``, when given, must agree with the file's"""
        path = pathlib.Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ValidationError(f"config file '{path}' does not exist") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file '{path}' is not valid JSON: {exc}") from exc
        if command is not None and isinstance(raw, dict):
            raw.setdefault("command", command)
            if raw["command"] != command:
                raise ValidationError(
                    f"file asks for '{raw['command']}', run as '{command}'",
                    key_path="command",
                )
        return cls.from_dict(raw, base_dir=path.parent)

    @classmethod
    def from_dict(cls, raw, base_dir=None):
        if not isinstance(raw, dict):
            raise ValidationError("configuration must be a JSON object")
        base_dir = pathlib.Path(base_dir or ".")
        unknown = set(raw) - TOP_LEVEL_KEYS
        if unknown:
            raise ValidationError(f"unknown keys {sorted(unknown)}", key_path="<root>")

        command = raw.get("command")
        if command not in COMMANDS:
            raise ValidationError(
                f"expected one of {COMMANDS}, got {command!r}", key_path="command"
            )
        if "seed" not in raw:
            raise ValidationError("an explicit seed is required", key_path="seed")
        seed = _positive_int(raw["seed"], "seed", minimum=0)
        if not isinstance(raw.get("output_dir"), str) or not raw["output_dir"]:
            raise ValidationError("must be a nonempty path", key_path="output_dir")
        output_dir = pathlib.Path(raw["output_dir"])
        if not output_dir.is_absolute():
            output_dir = base_dir / output_dir

        model = None
        if command in NEEDS_MODEL or "model" in raw:
            model = _load_model(raw.get("model"), base_dir)

        test_function = None
        if command in NEEDS_TEST_FUNCTION:
            if "test_function" not in raw:
                raise ValidationError("missing required key", key_path="test_function")
            test_function = TestFunction.from_config(
                raw["test_function"], model.d1, model.d2, key_path="test_function"
            )

        integrator = IntegratorConfig.from_config(raw.get("integrator"), key_path="integrator")
        probes = ProbeSpec.from_config(raw.get("probes"), key_path="probes")
        sections = {name: _section(raw, name) for name in SECTION_DEFAULTS}
        _validate_sections(command, sections)

        envelope = raw.get("envelope")
        if command in ("rate", "compare"):
            if envelope is None:
                raise ValidationError("missing required key", key_path="envelope")
        if envelope is not None and not isinstance(envelope, dict):
            raise ValidationError("must be a mapping", key_path="envelope")

        return cls(
            command,
            seed,
            output_dir,
            raw,
            model=model,
            test_function=test_function,
            integrator=integrator,
            probes=probes,
            sections=sections,
            envelope=envelope,
        )


def _load_model(value, base_dir):
    if value is None:
        raise ValidationError("missing required key", key_path="model")
    if isinstance(value, str):
        path = pathlib.Path(value)
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ValidationError(f"model file '{path}' does not exist", key_path="model")
        return ModelSpec.from_file(path, key_path="model")
    return ModelSpec.from_config(value, key_path="model")


def _validate_sections(command, sections):
    decay = sections["decay"]
    if command in ("decay", "compare") or decay["t_grid"] is not None:
        if decay["t_grid"] is None:
            raise ValidationError("missing required key", key_path="decay.t_grid")
        decay["t_grid"] = parse_t_grid(decay["t_grid"], "decay.t_grid")
    _positive_int(decay["n_outer"], "decay.n_outer", minimum=2)
    if decay["source"] not in DECAY_SOURCES:
        raise ValidationError(f"expected one of {DECAY_SOURCES}", key_path="decay.source")

    simulate = sections["simulate"]
    if command == "simulate":
        if simulate["t_grid"] is None:
            raise ValidationError("missing required key", key_path="simulate.t_grid")
        simulate["t_grid"] = parse_t_grid(simulate["t_grid"], "simulate.t_grid")
        _positive_int(simulate["n_paths"], "simulate.n_paths")
        start = simulate["start"]
        if not (start == "stationary" or isinstance(start, list)):
            raise ValidationError(
                "must be 'stationary' or a list of coordinates", key_path="simulate.start"
            )

    grid = sections["grid"]
    if command == "fpsolve" or (command == "compare" and decay["source"] == "grid"):
        t_grid = grid["t_grid"] if grid["t_grid"] is not None else decay["t_grid"]
        if t_grid is None:
            raise ValidationError("missing required key", key_path="grid.t_grid")
        grid["t_grid"] = parse_t_grid(t_grid, "grid.t_grid")
        _positive_int(grid["n_x"], "grid.n_x", minimum=3)
        _positive_int(grid["n_y"], "grid.n_y", minimum=3)
        if not (isinstance(grid["dt"], (int, float)) and grid["dt"] > 0):
            raise ValidationError("must be positive", key_path="grid.dt")
        density0 = grid["density0"]
        if density0 is not None:
            if not isinstance(density0, dict) or set(density0) - {"mean", "std"}:
                raise ValidationError(
                    "expected {'mean': [mx, my], 'std': [sx, sy]}", key_path="grid.density0"
                )

    rate = sections["rate"]
    if command == "rate":
        if rate["t_grid"] is None:
            raise ValidationError("missing required key", key_path="rate.t_grid")
        rate["t_grid"] = parse_t_grid(rate["t_grid"], "rate.t_grid")
