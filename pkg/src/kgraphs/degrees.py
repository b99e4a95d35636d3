"""Degree vectors in N^k / Z^k, represented as plain tuples of ints.

All comparisons are coordinatewise.  The distinguished constants are
``zero(k)`` and ``ones(k)`` (the vector e = (1, ..., 1)).
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator

Degree = tuple[int, ...]


def zero(k: int) -> Degree:
    return (0,) * k


def ones(k: int) -> Degree:
    return (1,) * k


def scaled(j: int, k: int) -> Degree:
    """j * e."""
    return (j,) * k


def unit(i: int, k: int) -> Degree:
    """The standard generator e_i."""
    return tuple(1 if c == i else 0 for c in range(k))


def add(a: Degree, b: Degree) -> Degree:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def sub(a: Degree, b: Degree) -> Degree:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def neg(a: Degree) -> Degree:
    return tuple(-x for x in a)


def leq(a: Degree, b: Degree) -> bool:
    return all(x <= y for x, y in zip(a, b, strict=True))


def meet(a: Degree, b: Degree) -> Degree:
    return tuple(min(x, y) for x, y in zip(a, b, strict=True))


def join(a: Degree, b: Degree) -> Degree:
    return tuple(max(x, y) for x, y in zip(a, b, strict=True))


def is_nonneg(a: Degree) -> bool:
    return all(x >= 0 for x in a)


def is_zero(a: Degree) -> bool:
    return all(x == 0 for x in a)


def norm_max(a: Degree) -> int:
    return max(abs(x) for x in a) if a else 0


def total(a: Degree) -> int:
    return sum(a)


def box(lo: Degree, hi: Degree) -> Iterator[Degree]:
    """All n with lo <= n <= hi, in lexicographic order."""
    if not leq(lo, hi):
        return iter(())
    return product(*(range(l, h + 1) for l, h in zip(lo, hi)))


def as_degree(value: Iterable[int], k: int) -> Degree:
    d = tuple(int(x) for x in value)
    if len(d) != k:
        raise ValueError(f"expected a length-{k} degree vector, got {d!r}")
    return d
