"""Deterministic chunked execution of replicate loops"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Tuple, TypeVar

from .exceptions import ParameterError

T = TypeVar('T')

# Replicates per chunk. Chunk boundaries must not depend on max_workers.
CHUNK_SIZE = 256


class ReplicateExecutor:
    """Run ``fn(start, stop)`` over fixed chunks of ``range(total)``.

    Results come back in chunk order whatever the completion order, so any
    reduction done by the caller is independent of the thread count.
    """

    def __init__(self, max_workers: int = 1, chunk_size: int = CHUNK_SIZE):
        if max_workers < 1:
            raise ParameterError(f"max_workers must be >= 1, got {max_workers}")
        self.max_workers = max_workers
        self.chunk_size = chunk_size

    def chunks(self, total: int) -> List[Tuple[int, int]]:
        return [(start, min(start + self.chunk_size, total)) for start in range(0, total, self.chunk_size)]

    def map_chunks(self, fn: Callable[[int, int], T], total: int) -> List[T]:
        chunks = self.chunks(total)
        if self.max_workers == 1 or len(chunks) <= 1:
            return [fn(*bounds) for bounds in chunks]

        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(lambda bounds: fn(*bounds), chunks))


SERIAL = ReplicateExecutor(max_workers=1)
