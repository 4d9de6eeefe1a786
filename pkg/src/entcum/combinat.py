"""Set partitions, Bell polynomials and moment/cumulant conversion.

Everything here is generic over commutative rings: values only need ``+``,
``*`` and multiplication by a Python ``int``.  This covers ``Fraction`` as well
as :class:`~entcum.symexpr.SymExpr`.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence

MAX_PARTITION_SIZE = 12

SetPartition = tuple[tuple[int, ...], ...]


def _check_size(l: int) -> None:
    if not isinstance(l, int) or not 1 <= l <= MAX_PARTITION_SIZE:
        raise ValueError(f"partition size must be an integer in 1..{MAX_PARTITION_SIZE}, got {l!r}")


def _restricted_growth_strings(l: int) -> Iterator[list[int]]:
    # a[i] <= 1 + max(a[:i]); enumerated in lexicographic order
    a = [0] * l
    b = [0] * l  # b[i] = max(a[:i])
    while True:
        yield a
        i = l - 1
        while i > 0 and a[i] == b[i] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        for j in range(i + 1, l):
            a[j] = 0
            b[j] = max(b[j - 1], a[j - 1])


def set_partitions(l: int) -> Iterator[SetPartition]:
    """All partitions of {1..l}; blocks sorted, block list sorted by least element."""
    _check_size(l)
    for rgs in _restricted_growth_strings(l):
        blocks: list[list[int]] = []
        for element, label in enumerate(rgs, start=1):
            if label == len(blocks):
                blocks.append([element])
            else:
                blocks[label].append(element)
        yield tuple(tuple(b) for b in blocks)


def validate_partition(p: SetPartition, l: int) -> None:
    seen = [x for block in p for x in block]
    if sorted(seen) != list(range(1, l + 1)) or any(not block for block in p):
        raise ValueError(f"{p} is not a partition of 1..{l}")
    if any(list(b) != sorted(b) for b in p) or [b[0] for b in p] != sorted(b[0] for b in p):
        raise ValueError(f"{p} is not in normal form")


@lru_cache(maxsize=None)
def partition_shapes(l: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Block-size multisets of partitions of {1..l} with their multiplicities."""
    counts: Counter = Counter()
    for p in set_partitions(l):
        counts[tuple(sorted((len(b) for b in p), reverse=True))] += 1
    return tuple(sorted(counts.items(), reverse=True))


def bell_number(l: int) -> int:
    return sum(c for _, c in partition_shapes(l))


def _product(values):
    out = None
    for v in values:
        out = v if out is None else out * v
    return out


def _total(values):
    out = None
    for v in values:
        out = v if out is None else out + v
    return out


def bell_incomplete(k: int, j: int, z: Sequence) -> object:
    """B_{k,j}(z_1, ..., z_{k-j+1}) as a sum over partitions of {1..k} into j blocks."""
    if not 1 <= j <= k:
        raise ValueError(f"need 1 <= j <= k, got k={k}, j={j}")
    if len(z) < k - j + 1:
        raise ValueError(f"B_{{{k},{j}}} needs {k - j + 1} arguments, got {len(z)}")
    terms = [count * _product(z[s - 1] for s in shape) for shape, count in partition_shapes(k) if len(shape) == j]
    return _total(terms)


def bell_complete(z: Sequence) -> object:
    """B_k(z_1, ..., z_k) with k = len(z)."""
    k = len(z)
    if k == 0:
        raise ValueError("complete Bell polynomial needs at least one argument")
    return _total(count * _product(z[s - 1] for s in shape) for shape, count in partition_shapes(k))


def moments_from_cumulants(kappa: Sequence) -> list:
    """Raw moments mu_1..mu_l from cumulants kappa_1..kappa_l."""
    return [bell_complete(kappa[:l]) for l in range(1, len(kappa) + 1)]


def cumulants_from_moments(mu: Sequence) -> list:
    """Cumulants kappa_1..kappa_l from raw moments mu_1..mu_l."""
    out = []
    for l in range(1, len(mu) + 1):
        terms = []
        for shape, count in partition_shapes(l):
            j = len(shape)
            coef = count * (-1) ** (j - 1) * factorial(j - 1)
            terms.append(coef * _product(mu[s - 1] for s in shape))
        out.append(_total(terms))
    return out
