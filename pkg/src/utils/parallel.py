"""Order-preserving thread fan-out."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(fn: Callable[[T], R], items: Sequence[T], n_workers: int = 1, verbose: int = 0) -> List[R]:
    """Apply fn to every item, in worker threads when n_workers > 1, keeping input order.

    With verbose >= 1 a progress line is printed at each quarter of the items.
    """
    n = len(items)
    progress_points = [int(n * p) for p in [0.25, 0.5, 0.75, 1.0]]

    if n_workers <= 1 or n <= 1:
        results = (fn(item) for item in items)
        return _collect(results, n, progress_points, verbose)
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return _collect(pool.map(fn, items), n, progress_points, verbose)


def _collect(results, n: int, progress_points: List[int], verbose: int) -> list:
    out = []
    for result in results:
        out.append(result)
        if verbose >= 1 and len(out) in progress_points:
            pct = (len(out) / n) * 100
            print(f"  Progress: {len(out):,}/{n:,} ({pct:.0f}%)")
    return out
