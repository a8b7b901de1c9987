"""Exact rank of sparse rational matrices by Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, Iterable, List, Mapping


def rank(columns: Iterable[Mapping[Hashable, Fraction]]) -> int:
    """Rank of the matrix whose columns are given as sparse {row_key: value} maps.

    Each incoming column is reduced against the pivots found so far; a column
    with a nonzero remainder contributes a new pivot.
    """
    pivots: Dict[Hashable, Dict[Hashable, Fraction]] = {}
    r = 0
    for col in columns:
        v = {k: Fraction(c) for k, c in col.items() if c}
        while v:
            key = min(v, key=repr)
            piv = pivots.get(key)
            if piv is None:
                scale = v[key]
                pivots[key] = {k: c / scale for k, c in v.items()}
                r += 1
                break
            factor = v[key]
            for k, c in piv.items():
                nv = v.get(k, Fraction(0)) - factor * c
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return r


def is_zero_vector(v: Mapping[Hashable, Fraction]) -> bool:
    return not any(v.values())


def dense_rank(rows: List[List[Fraction]]) -> int:
    """Rank of a dense matrix (used as a cross-check in tests)."""
    cols = []
    for j in range(len(rows[0]) if rows else 0):
        cols.append({i: Fraction(rows[i][j]) for i in range(len(rows)) if rows[i][j]})
    return rank(cols)
