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


class ValidationError(ValueError):
    """Raised when a configuration or a precondition of an operation is violated.

    Parameters
    ----------
    message: str
        Human readable description of the problem
    key_path: str, optional
        Dotted path of the offending configuration key, e.g. ``model.sigma.params.s``
    """

    def __init__(self, message, key_path=None):
        self.key_path = key_path
        self.message = message
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class NumericalError(RuntimeError):
    """Raised when a numerical procedure fails (non-convergence, factorization, blow-up)."""
