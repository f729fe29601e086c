"""
Trial Runner
============

Run independent Monte Carlo trials on a thread pool. Every trial derives its
own random stream from (seed, trial index), so results do not depend on
scheduling; they are returned in trial order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, NamedTuple, Optional, TypeVar

import pandas as pd
from tqdm import tqdm

from entropy_bounds.core.config import settings
from entropy_bounds.core.exceptions import EntropyBoundsException

logger = logging.getLogger(__name__)

T = TypeVar("T")


class ExperimentResult(NamedTuple):
    """Aggregated rows (one per n) and the raw per-trial rows."""

    summary: pd.DataFrame
    trials: pd.DataFrame


class TrialRunner:
    """
    Executes ``fn(trial_index)`` for a range of trial indices in parallel.
    """

    def __init__(self, max_workers: Optional[int] = None, show_progress: Optional[bool] = None):
        self.max_workers = max_workers or settings.MAX_WORKERS
        self.show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress

    def run(self, fn: Callable[[int], T], trials: int, desc: str = "trials", offset: int = 0) -> List[T]:
        """
        Run ``trials`` calls of ``fn`` with indices offset, ..., offset + trials - 1.

        Returns:
            Results ordered by trial index.

        Raises:
            EntropyBoundsException: the first failure (by trial index) once every
                trial has finished.
        """
        results: dict = {}
        errors: dict = {}

        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            future_to_trial = {executor.submit(fn, offset + t): offset + t for t in range(trials)}
            for future in tqdm(
                as_completed(future_to_trial), total=trials, desc=desc, disable=not self.show_progress
            ):
                trial = future_to_trial[future]
                try:
                    results[trial] = future.result()
                except EntropyBoundsException as e:
                    logger.error("trial %d failed: %s", trial, e.message)
                    errors[trial] = e

        if errors:
            logger.info("%s: %d of %d trials failed", desc, len(errors), trials)
            raise errors[min(errors)]
        return [results[offset + t] for t in range(trials)]
