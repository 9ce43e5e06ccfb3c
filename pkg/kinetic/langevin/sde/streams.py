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
import numpy as np

from kinetic.langevin.exceptions import ValidationError

# spawn-key prefix reserved for the draws of starting points
STARTS_KEY = 2**32 - 1
# normals drawn per trajectory at a time
CHUNK_STEPS = 256


def _check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValidationError(f"seed must be a nonnegative integer, got {seed!r}", key_path="seed")
    return int(seed)


def trajectory_stream(seed, index, pair=0):
    """Philox generator owned by trajectory ``index`` of pair member ``pair``

    The stream depends only on (seed, index, pair), never on how trajectories are grouped into
    blocks or on the order in which blocks run.
    """
    sequence = np.random.SeedSequence(_check_seed(seed), spawn_key=(int(index), int(pair)))
    return np.random.Generator(np.random.Philox(sequence))


def start_sequence(seed, component):
    """SeedSequence for the starting points of component 1 (x) or 2 (y)"""
    return np.random.SeedSequence(_check_seed(seed), spawn_key=(STARTS_KEY, int(component)))


class IncrementSource:
    """Gaussian increments for a block of trajectories, one independent stream each

    ``next()`` returns an array of shape (block, dim) for the next time step.
    """

    def __init__(self, seed, indices, dim, pair=0, chunk=CHUNK_STEPS):
        self.dim = dim
        self.chunk = chunk
        self._streams = [trajectory_stream(seed, index, pair) for index in indices]
        self._buffer = np.empty((0, len(self._streams), dim))
        self._position = 0

    def _refill(self):
        draws = [stream.standard_normal((self.chunk, self.dim)) for stream in self._streams]
        self._buffer = np.stack(draws, axis=1)
        self._position = 0

    def next(self):
        if self._position >= len(self._buffer):
            self._refill()
        increment = self._buffer[self._position]
        self._position += 1
        return increment
