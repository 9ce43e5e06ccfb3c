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
import importlib
import logging

from kinetic.langevin.exceptions import ValidationError

LOG = logging.getLogger("kinetic-langevin")


def load_custom(config, key_path=""):
    """Instantiate a user supplied object from its ``module_name``/``class_name`` pair

    The class has to provide a ``from_config(config)`` classmethod, exactly like the
    built-in families do. The whole config block is handed over so the class can read its
    own ``params``.
    """
    module_name = config.get("module_name")
    class_name = config.get("class_name")
    if not module_name or not class_name:
        raise ValidationError(
            "custom family requires both 'module_name' and 'class_name'", key_path=key_path
        )

    try:
        custom_module = importlib.import_module(module_name)
    except ImportError as exc:
        raise ValidationError(
            f"unable to import module '{module_name}': {exc}", key_path=f"{key_path}.module_name"
        ) from exc

    custom_class = getattr(custom_module, class_name, None)
    if custom_class is None or not hasattr(custom_class, "from_config"):
        raise ValidationError(
            f"'{module_name}.{class_name}' not found or lacks a from_config classmethod",
            key_path=f"{key_path}.class_name",
        )

    LOG.debug("Loading custom family %s.%s for %s", module_name, class_name, key_path)
    return custom_class.from_config(config)


def fetch_param(config, name, key_path, default=None, required=False):
    params = config.get("params", {}) or {}
    if name not in params:
        if required:
            raise ValidationError(
                "missing required parameter", key_path=f"{key_path}.params.{name}"
            )
        return default
    return params[name]
