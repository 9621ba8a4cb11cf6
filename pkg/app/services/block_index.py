# app/services/block_index.py
"""Flat index k <-> block coordinates (q, j, eps).

Every k >= 1 is uniquely k = (2q^2 + 1)/2 + eps(2j - 1)/2 with 1 <= j <= q:
eps = -1 covers q(q-1)+1 .. q^2 (j descending), eps = +1 covers
q^2+1 .. q(q+1) (j ascending).
"""
import math
from typing import Tuple

from app.exceptions.block_index import InvalidBlockCoordinatesError, InvalidBlockIndexError
from app.schemas.block_index import BlockCoordinates


def block_of(k: int) -> int:
    """Smallest q with q(q+1) >= k."""
    if k < 1:
        raise InvalidBlockIndexError(k)
    q = max(1, math.isqrt(k))
    while q * (q + 1) < k:
        q += 1
    while q > 1 and (q - 1) * q >= k:
        q -= 1
    return q


def block_bounds(q: int) -> Tuple[int, int]:
    """First and last flat index of block q."""
    if q < 1:
        raise InvalidBlockCoordinatesError(q=q, j=1)
    return q * (q - 1) + 1, q * (q + 1)


def decode(k: int) -> BlockCoordinates:
    q = block_of(k)
    if k <= q * q:
        return BlockCoordinates(q=q, j=q * q - k + 1, eps=-1)
    return BlockCoordinates(q=q, j=k - q * q, eps=1)


def encode(c: BlockCoordinates) -> int:
    if not 1 <= c.j <= c.q:
        raise InvalidBlockCoordinatesError(q=c.q, j=c.j, eps=c.eps)
    if c.eps == -1:
        return c.q * c.q - c.j + 1
    return c.q * c.q + c.j


def coordinate(q: int, j: int) -> int:
    """Basis coordinate of the witness y_{q,j}; distinct blocks never share one."""
    if q < 1 or not 1 <= j <= q:
        raise InvalidBlockCoordinatesError(q=q, j=j)
    return q * (q - 1) // 2 + j
