"""
Symmetric monomial index sets.

A degree-p term over an n-element patch has one independent coefficient per
multiset of p indices, i.e. per non-decreasing p-tuple over [0, n). These are
enumerated in lexicographic order, which is also the order weights are stored in.
"""
import math
from collections import Counter
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import List, NamedTuple, Tuple

import numpy as np

from core.errors import ParameterError

MAX_ORDER = 8
_INT64_MAX = 2**63 - 1


class MonomialIndex(NamedTuple):
    indices: Tuple[int, ...]
    multiplicity: int


def _check(n: int, p: int):
    if n < 1:
        raise ParameterError(f"Patch size n must be at least 1, got {n}")
    if not 1 <= p <= MAX_ORDER:
        raise ParameterError(f"Order p must lie in [1, {MAX_ORDER}], got {p}")


def multiplicity(indices: Tuple[int, ...]) -> int:
    """Number of distinct orderings of ``indices``."""
    count = math.factorial(len(indices))
    for repeat in Counter(indices).values():
        count //= math.factorial(repeat)
    return count


def enumerate_monomials(n: int, p: int) -> List[MonomialIndex]:
    _check(n, p)
    return [MonomialIndex(indices, multiplicity(indices)) for indices in combinations_with_replacement(range(n), p)]


def unique_count(n: int, p: int) -> int:
    """Number of unique order-p weights: C(n+p-1, p)."""
    _check(n, p)
    count = math.comb(n + p - 1, p)
    if count > _INT64_MAX:
        raise OverflowError(f"unique_count({n}, {p}) exceeds 64-bit range")
    return count


def cumulative_count(n: int, p: int) -> int:
    """Monomials of every degree 0..p: C(n+p, p) = (n+p)!/(n!p!)."""
    _check(n, p)
    count = math.comb(n + p, p)
    if count > _INT64_MAX:
        raise OverflowError(f"cumulative_count({n}, {p}) exceeds 64-bit range")
    return count


@lru_cache(maxsize=64)
def monomial_table(n: int, p: int) -> np.ndarray:
    """(C(n+p-1, p), p) int array of the enumerated index tuples; read-only."""
    table = np.array([m.indices for m in enumerate_monomials(n, p)], dtype=np.intp).reshape(-1, p)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=64)
def scatter_matrices(n: int, p: int) -> Tuple[np.ndarray, ...]:
    """One-hot (M, n) matrices, one per tuple position, mapping monomial slots back to patch entries."""
    table = monomial_table(n, p)
    matrices = []
    for position in range(p):
        onehot = np.zeros((table.shape[0], n))
        onehot[np.arange(table.shape[0]), table[:, position]] = 1.0
        onehot.setflags(write=False)
        matrices.append(onehot)
    return tuple(matrices)
