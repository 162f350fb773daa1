"""Naive oracles and random-instance helpers shared by the test suite.

Every oracle here is coded independently of the library fast paths (only
CMatrix construction is shared), and deliberately kept as close to the
defining formula as possible.
"""

from __future__ import annotations

import numpy as np

from specdet import CMatrix


def rand_complex(rng, scale: float = 1.0) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def rand_cmatrix(rng, rows: int, cols: int | None = None, scale: float = 1.0) -> CMatrix:
    cols = rows if cols is None else cols
    return CMatrix(rows, cols,
                   tuple(rand_complex(rng, scale) for _ in range(rows * cols)))


def naive_matmul(a: CMatrix, b: CMatrix) -> CMatrix:
    """Triple-loop product, k ascending, written from the definition."""
    assert a.cols == b.rows
    out = []
    for i in range(a.rows):
        for j in range(b.cols):
            total = 0j
            for k in range(a.cols):
                total += a.at(i, k) * b.at(k, j)
            out.append(total)
    return CMatrix(a.rows, b.cols, tuple(out))


def cofactor_determinant(m: CMatrix) -> complex:
    """Recursive cofactor expansion along the first row; fine for n <= 7."""
    n = m.rows
    if n == 0:
        return 1 + 0j
    if n == 1:
        return m.at(0, 0)
    total = 0j
    for j in range(n):
        minor_entries = []
        for r in range(1, n):
            for c in range(n):
                if c != j:
                    minor_entries.append(m.at(r, c))
        minor = CMatrix(n - 1, n - 1, tuple(minor_entries))
        total += ((-1) ** j) * m.at(0, j) * cofactor_determinant(minor)
    return total


def naive_power_trace(m: CMatrix, p: int) -> complex:
    """Literal nested sum over index chains i0 -> i1 -> ... -> i0."""
    import itertools

    n = m.rows
    total = 0j
    for chain in itertools.product(range(n), repeat=p):
        closed = chain + (chain[0],)
        prod = 1 + 0j
        for s in range(p):
            prod *= m.at(closed[s], closed[s + 1])
        total += prod
    return total


def charpoly_eig_det(m: CMatrix, lam: complex) -> complex:
    """det(I + lam*m) as the product of the eigenvalues of I + lam*m,
    the eigenvalues obtained as roots of the characteristic polynomial
    computed by the Faddeev-LeVerrier recursion."""
    n = m.rows
    a = np.array([[complex(lam) * m.at(i, j) + (1.0 if i == j else 0.0)
                   for j in range(n)] for i in range(n)], dtype=complex)
    coeffs = [1.0 + 0j]  # monic characteristic polynomial of a
    mk = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-(a @ mk).trace() / k)
    roots = np.roots(np.array(coeffs))
    det = 1 + 0j
    for r in roots:
        det *= complex(r)
    return det


def assemble_block_diagonal(blocks) -> CMatrix:
    """Block-diagonal matrix with the given square blocks on the diagonal."""
    side = sum(b.rows for b in blocks)
    entries = [[0j] * side for _ in range(side)]
    offset = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                entries[offset + i][offset + j] = b.at(i, j)
        offset += b.rows
    return CMatrix.from_rows(entries)
