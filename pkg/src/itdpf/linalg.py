"""Deterministic Gaussian elimination over a finite field.

Pivoting is fixed (first nonzero entry scanning rows top-down, columns
left to right) and free variables are set to zero, so a given system
always yields the same solution vector, which keeps every derived
artifact byte-reproducible.
"""

from __future__ import annotations

from .field import Field, FieldElement


def solve_linear_system(
    field: Field,
    rows: list[list[FieldElement]],
    rhs: list[FieldElement],
) -> list[FieldElement] | None:
    """Solve rows @ a = rhs; return the canonical solution or None.

    Returns None exactly when the system is inconsistent.  Under- and
    over-determined systems are both handled; non-pivot columns get the
    zero element.
    """
    if len(rows) != len(rhs):
        raise ValueError("row/rhs length mismatch")
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    aug = [list(r) + [v] for r, v in zip(rows, rhs)]

    pivot_cols: list[int] = []
    rank = 0
    for col in range(n_cols):
        pivot = None
        for i in range(rank, n_rows):
            if not aug[i][col].is_zero():
                pivot = i
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        inv = aug[rank][col].inverse()
        aug[rank] = [inv * x for x in aug[rank]]
        for i in range(n_rows):
            if i != rank and not aug[i][col].is_zero():
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[rank])]
        pivot_cols.append(col)
        rank += 1
        if rank == n_rows:
            break

    for i in range(rank, n_rows):
        if not aug[i][n_cols].is_zero():
            return None

    solution = [field.zero] * n_cols
    for i, col in enumerate(pivot_cols):
        solution[col] = aug[i][n_cols]
    return solution
