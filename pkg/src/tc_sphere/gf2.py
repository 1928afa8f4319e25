"""Row reduction over GF(2) on int bitsets."""

from __future__ import annotations

from typing import Iterable, List


def echelon(rows: Iterable[int]) -> List[int]:
    """Return a reduced basis of the row span, keyed by distinct leading bits."""
    basis: List[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            # keep basis reduced so that `min` above clears leading bits
            basis = [min(b, b ^ row) for b in basis]
            basis.append(row)
            basis.sort(reverse=True)
    return basis


def rank(rows: Iterable[int]) -> int:
    return len(echelon(rows))


def in_span(vec: int, rows: Iterable[int]) -> bool:
    """True iff ``vec`` is a GF(2) combination of ``rows``."""
    for b in echelon(rows):
        vec = min(vec, vec ^ b)
    return vec == 0
