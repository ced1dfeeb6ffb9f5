"""Systems of linear Diophantine equations.

``solve_z`` works over the integers by unimodular column reduction to a lower
echelon form (repeated gcd elimination, exact Python ints), followed by
forward substitution.  ``solve_n_bounded`` is the exponential fallback over
the naturals for sums without inverses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple


class NegativeCoefficientError(ValueError):
    pass


@dataclass(frozen=True)
class DiophantineSystem:
    coefficients: Tuple[Tuple[int, ...], ...]
    targets: Tuple[int, ...]
    nvars: int

    def __post_init__(self):
        if len(self.coefficients) != len(self.targets):
            raise ValueError("one target per row required")
        if any(len(row) != self.nvars for row in self.coefficients):
            raise ValueError("every row must have nvars coefficients")

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]], targets: Sequence[int], nvars: Optional[int] = None
           ) -> "DiophantineSystem":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if nvars is None:
            nvars = len(rows[0]) if rows else 0
        return cls(rows, tuple(int(t) for t in targets), nvars)

    def satisfied_by(self, beta: Sequence[int]) -> bool:
        return len(beta) == self.nvars and all(
            sum(c * b for c, b in zip(row, beta)) == t
            for row, t in zip(self.coefficients, self.targets)
        )


def solve_z(sys: DiophantineSystem) -> Optional[Tuple[int, ...]]:
    """Some integer solution of ``A beta = alpha``, or ``None`` if there is none."""
    q = sys.nvars
    h: List[List[int]] = [list(r) for r in sys.coefficients]
    u: List[List[int]] = [[int(i == j) for j in range(q)] for i in range(q)]  # columns of U
    # invariant: h == A * U, kept column-wise (u[j] is column j of U)

    def col_sub(dst: int, src: int, k: int):
        for row in h:
            row[dst] -= k * row[src]
        ud, us = u[dst], u[src]
        for i in range(q):
            ud[i] -= k * us[i]

    def col_swap(a: int, b: int):
        for row in h:
            row[a], row[b] = row[b], row[a]
        u[a], u[b] = u[b], u[a]

    pivots: List[Tuple[int, int]] = []
    pc = 0
    for r, row in enumerate(h):
        if pc >= q:
            break
        while True:
            nz = [j for j in range(pc, q) if row[j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda c: abs(row[c]))
            if j != pc:
                col_swap(j, pc)
            done = True
            for c in range(pc + 1, q):
                if row[c]:
                    col_sub(c, pc, row[c] // row[pc])
                    if row[c]:
                        done = False
            if done:
                break
        if row[pc] != 0:
            pivots.append((r, pc))
            pc += 1

    y = [0] * q
    pivot_of_row = dict(pivots)
    for r, row in enumerate(h):
        acc = sys.targets[r] - sum(row[c] * y[c] for c in range(q) if y[c])
        c = pivot_of_row.get(r)
        if c is None:
            if acc != 0:
                return None
            continue
        if acc % row[c]:
            return None
        y[c] = acc // row[c]
    beta = tuple(sum(u[j][i] * y[j] for j in range(q)) for i in range(q))
    assert sys.satisfied_by(beta)
    return beta


def solve_n_bounded(sys: DiophantineSystem, bound: int) -> Optional[Tuple[int, ...]]:
    """A solution in ``{0..bound}^q`` by pruned depth-first search.

    Requires non-negative coefficients (partial sums then only grow).
    """
    if any(c < 0 for row in sys.coefficients for c in row):
        raise NegativeCoefficientError("solve_n_bounded needs non-negative coefficients; use solve_z")
    if any(t < 0 for t in sys.targets):
        return None
    q = sys.nvars
    rows = sys.coefficients
    targets = sys.targets
    # live[i][r]: some column >= i can still change row r
    live = [[any(row[c] for c in range(i, q)) for row in rows] for i in range(q + 1)]

    def dfs(i: int, partial: List[int]) -> Optional[List[int]]:
        for r, p in enumerate(partial):
            if not live[i][r] and p != targets[r]:
                return None
        if i == q:
            return []
        col = [row[i] for row in rows]
        for v in range(bound + 1) if any(col) else (0,):
            p = [a + v * c for a, c in zip(partial, col)]
            if any(a > t for a, t in zip(p, targets)):
                break
            sub = dfs(i + 1, p)
            if sub is not None:
                return [v] + sub
        return None

    sol = dfs(0, [0] * len(rows))
    return None if sol is None else tuple(sol)
