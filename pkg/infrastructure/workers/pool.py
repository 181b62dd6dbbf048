"""
Parallel map over independent simulation tasks.

Results always come back in input order, so a run reduces to the same
numbers whatever the worker count.
"""
from __future__ import annotations

from typing import Callable, Iterable, List, TypeVar

import structlog
from joblib import Parallel, delayed

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class WorkerPool:
    def __init__(self, n_jobs: int = 1, backend: str = "loky") -> None:
        if n_jobs == 0:
            raise ValueError("n_jobs must be non-zero (1 = sequential, -1 = all cores)")
        self.n_jobs = n_jobs
        self.backend = backend

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
        items = list(items)
        if self.n_jobs == 1 or len(items) <= 1:
            return [fn(item) for item in items]
        logger.debug("parallel_map", tasks=len(items), n_jobs=self.n_jobs, backend=self.backend)
        return list(Parallel(n_jobs=self.n_jobs, backend=self.backend)(delayed(fn)(item) for item in items))
