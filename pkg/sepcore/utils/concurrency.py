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
from timeit import default_timer as timer
from typing import Any, Callable

import trio

from sepcore import settings


def run_jobs(jobs: dict, workers: int | None = None) -> dict:
    """Run independent zero-argument callables, returning results keyed like `jobs`.

    With more than one worker the jobs run on trio worker threads bounded by a
    CapacityLimiter; the result dict is rebuilt in the key order of `jobs`.
    """
    workers = settings.PARALLEL_WORKERS if workers is None else workers
    start = timer()
    if workers <= 1 or len(jobs) <= 1:
        results = {key: job() for key, job in jobs.items()}
    else:
        results = trio.run(_run_threaded, jobs, workers)
        for key in jobs:
            if isinstance(results[key], _Failed):
                raise results[key].error
    logging.debug(f"run_jobs {len(jobs)} jobs on {max(workers, 1)} workers cost {timer() - start}s")
    return {key: results[key] for key in jobs}


async def _run_threaded(jobs: dict, workers: int) -> dict:
    limiter = trio.CapacityLimiter(workers)
    results: dict = {}

    async def _one(key: Any, job: Callable):
        async with limiter:
            results[key] = await trio.to_thread.run_sync(_guarded, job)

    async with trio.open_nursery() as nursery:
        for key, job in jobs.items():
            nursery.start_soon(_one, key, job)
    return results


class _Failed:
    def __init__(self, error: Exception):
        self.error = error


def _guarded(job: Callable) -> Any:
    # errors are re-raised in key order by run_jobs, not through the nursery
    try:
        return job()
    except Exception as e:
        return _Failed(e)
