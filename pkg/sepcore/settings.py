#
#  Copyright 2025 The Separability Kernel Authors. All Rights Reserved.
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.
#
import logging
import os

from dotenv import load_dotenv

SCALAR_MODE = "exact"
TOLERANCE = 1e-9
SEED = 0
PARALLEL_WORKERS = 1
EXHAUSTIVE_DIM = 36
CAUCHY_SAMPLES = 200


def _env_int(name: str, default: str) -> int:
    raw = os.environ.get(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


def _env_float(name: str, default: str) -> float:
    raw = os.environ.get(name, default)
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{name} must be a number, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {raw!r}")
    return value


def init_settings(dotenv: bool = True):
    global SCALAR_MODE, TOLERANCE, SEED, PARALLEL_WORKERS, EXHAUSTIVE_DIM, CAUCHY_SAMPLES
    if dotenv:
        load_dotenv()
    mode = os.environ.get("SEPKERNEL_MODE", "exact").strip().lower()
    if mode == "float":
        mode = "float64"
    if mode not in ("exact", "float64"):
        raise ValueError(f"SEPKERNEL_MODE must be 'exact' or 'float64', got {mode!r}")
    SCALAR_MODE = mode
    TOLERANCE = _env_float("SEPKERNEL_TOL", "1e-9")
    SEED = _env_int("SEPKERNEL_SEED", "0")
    PARALLEL_WORKERS = max(_env_int("SEPKERNEL_PARALLEL", "1"), 0)
    EXHAUSTIVE_DIM = _env_int("SEPKERNEL_EXHAUSTIVE_DIM", "36")
    CAUCHY_SAMPLES = _env_int("SEPKERNEL_CAUCHY_SAMPLES", "200")
    logging.debug(f"settings: mode={SCALAR_MODE} tol={TOLERANCE} seed={SEED} parallel={PARALLEL_WORKERS}")


init_settings(dotenv=False)
