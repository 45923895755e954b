"""Chunked fan-out over a thread pool with order-preserving reassembly."""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def chunk_bounds(n: int, chunk_size: int) -> List[range]:
    return [range(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


def map_chunks(
    fn: Callable[[range], List[T]],
    n: int,
    max_workers: int = 1,
    chunk_size: int = 256
) -> List[T]:
    """
    Apply ``fn`` to consecutive index ranges covering ``[0, n)`` and concatenate.

    ``fn`` must be pure in its range; the output is identical for any
    ``max_workers``.
    """
    chunks = chunk_bounds(n, chunk_size)
    if max_workers <= 1 or len(chunks) <= 1:
        out: List[T] = []
        for chunk in chunks:
            out.extend(fn(chunk))
        return out

    results = [None] * len(chunks)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_pos = {executor.submit(fn, chunk): pos for pos, chunk in enumerate(chunks)}
        for future in as_completed(future_to_pos):
            pos = future_to_pos[future]
            try:
                results[pos] = future.result()
            except Exception as e:
                logger.error(f"Chunk {chunks[pos].start}-{chunks[pos].stop} failed: {e}")
                raise
    logger.debug(f"Scored {n} points in {len(chunks)} chunks on {max_workers} workers")
    return [item for part in results for item in part]
