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
import argparse
import hashlib
import json
import logging
import os
import pathlib
import platform
import shutil
import sys
import tempfile
import time

import dask
import numpy as np
import pandas as pd
import scipy

from kinetic.langevin import __version__
from kinetic.langevin.cli.commands import COMMANDS
from kinetic.langevin.cli.config import ExperimentConfig
from kinetic.langevin.exceptions import NumericalError, ValidationError

LOG = logging.getLogger("kinetic-langevin")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
MANIFEST = "manifest.json"


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, pathlib.Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def versions():
    return {
        "kinetic-langevin": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "dask": dask.__version__,
    }


def write_artifacts(config, output, wall_time):
    """Write the CSV tables and the manifest, replacing ``config.output_dir`` atomically

    Everything is staged in a sibling temporary directory, which is removed on failure.
    """
    target = pathlib.Path(config.output_dir)
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = pathlib.Path(tempfile.mkdtemp(prefix=f".{target.name}-", dir=target.parent))
    try:
        digests = {}
        for stem, table in sorted(output.tables.items()):
            path = staging / f"{stem}.csv"
            table.to_csv(path, index=False, float_format="%.17g")
            digests[path.name] = _sha256(path)
        manifest = {
            "command": config.command,
            "seed": config.seed,
            "config": config.raw,
            "versions": versions(),
            "wall_time_s": wall_time,
            "outputs": digests,
            "results": output.results,
        }
        with open(staging / MANIFEST, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True, default=_jsonable)
        if target.exists():
            shutil.rmtree(target)
        os.replace(staging, target)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    LOG.info("Wrote %d tables to %s", len(output.tables), target)
    return target


def run(config):
    """Execute the configured subcommand and persist its artefacts

    Returns
    -------
    pathlib.Path
        The output directory
    """
    began = time.perf_counter()
    output = COMMANDS[config.command](config)
    wall_time = time.perf_counter() - began
    target = write_artifacts(config, output, wall_time)
    LOG.info("%s finished in %.2fs", config.command, wall_time)
    return target


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kinetic-langevin",
        description="Simulate degenerate Langevin dynamics and audit their decay rates",
    )
    parser.add_argument(
        "command", choices=sorted(COMMANDS), help="Subcommand; must match the config's"
    )
    parser.add_argument("config", help="JSON experiment configuration")
    parser.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Concurrent trajectory blocks (results do not depend on it)",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity",
    )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    try:
        config = ExperimentConfig.from_file(args.config, command=args.command)
        if args.workers is not None and args.workers < 1:
            raise ValidationError("must be a positive integer", key_path="--workers")
        run(config.with_workers(args.workers))
    except ValidationError as exc:
        LOG.exception("Invalid configuration: %s", exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        LOG.exception("Numerical failure: %s", exc)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
