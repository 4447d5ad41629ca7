"""Runs independent numbered jobs on anyio worker threads.

Results come back in job order, so anything reduced from them does not
depend on the thread count.
"""

import logging
from datetime import timedelta
from timeit import default_timer as get_current_time
from typing import Any, Callable, List

import anyio
import anyio.to_thread
import numpy as np

from config import PROGRESS_EVERY
from errors import InputError, L1PCAError, NumericalError

logger = logging.getLogger(__name__)


class BatchProgress:
    def __init__(self, total: int, label: str):
        self.total = total
        self.label = label
        self.done = 0
        self.time = get_current_time()
        # short batches, e.g. the ranges of one enumeration, only log at debug level
        self.level = logging.INFO if total >= PROGRESS_EVERY else logging.DEBUG

    def get_elapsed(self):
        return str(timedelta(seconds=get_current_time() - self.time))

    def advance(self):
        self.done += 1
        if self.done % PROGRESS_EVERY == 0 or self.done == self.total:
            logger.log(self.level, "%s: %d/%d trials | Elapsed %s", self.label, self.done, self.total,
                self.get_elapsed())


def run_trials(count: int, trial: Callable[[int], Any], threads: int = 1, label: str = "batch") -> List[Any]:
    """trial(0), ..., trial(count - 1) on at most `threads` worker threads.

    Returns results in trial order; the first failing trial (by index) re-raises.
    Arithmetic and linear-algebra failures surface as NumericalError.
    """
    if threads < 1:
        raise InputError(f"threads must be >= 1, got {threads}")
    return anyio.run(_run_trials, count, trial, threads, label)


async def _run_trials(count: int, trial: Callable[[int], Any], threads: int, label: str):
    limiter = anyio.CapacityLimiter(threads)
    progress = BatchProgress(count, label)
    results: List[Any] = [None] * count

    async def run_one(index: int):
        try:
            results[index] = await anyio.to_thread.run_sync(trial, index, limiter=limiter)
        except L1PCAError as e:
            results[index] = e
        except (ArithmeticError, np.linalg.LinAlgError) as e:
            error = NumericalError(f"trial {index}: {type(e).__name__}: {e}")
            error.__cause__ = e
            results[index] = error
        progress.advance()

    async with anyio.create_task_group() as tg:
        for index in range(count):
            tg.start_soon(run_one, index)

    for result in results:
        if isinstance(result, L1PCAError):
            raise result
    return results

