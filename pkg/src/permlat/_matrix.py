"""Small helpers around flint integer matrices.

Every matrix in the package is a ``flint.fmpz_mat``; these helpers cover the
stacking, slicing and modular reductions flint does not provide directly.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import flint

fmpz_mat = flint.fmpz_mat
nmod_mat = flint.nmod_mat
fmpq_mat = flint.fmpq_mat


def as_mat(rows) -> fmpz_mat:
    if isinstance(rows, fmpz_mat):
        return rows
    rows = [[int(x) for x in r] for r in rows]
    if not rows:
        return fmpz_mat(0, 0)
    return fmpz_mat(rows)


def to_lists(m) -> list[list[int]]:
    return [[int(x) for x in row] for row in m.tolist()]


def identity(n: int) -> fmpz_mat:
    m = fmpz_mat(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def zeros(r: int, c: int) -> fmpz_mat:
    return fmpz_mat(r, c)


def columns(m: fmpz_mat) -> list[list[int]]:
    rows = to_lists(m)
    return [[row[j] for row in rows] for j in range(m.ncols())]


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> fmpz_mat:
    out = fmpz_mat(nrows, len(cols))
    for j, c in enumerate(cols):
        for i, x in enumerate(c):
            if x:
                out[i, j] = int(x)
    return out


def hstack(mats: Sequence[fmpz_mat], nrows: int | None = None) -> fmpz_mat:
    if nrows is None:
        nrows = mats[0].nrows()
    total = sum(m.ncols() for m in mats)
    out = fmpz_mat(nrows, total)
    off = 0
    for m in mats:
        rows = m.tolist()
        for i in range(nrows):
            r = rows[i]
            for j in range(m.ncols()):
                if r[j]:
                    out[i, off + j] = r[j]
        off += m.ncols()
    return out


def vstack(mats: Sequence[fmpz_mat], ncols: int | None = None) -> fmpz_mat:
    if ncols is None:
        ncols = mats[0].ncols()
    total = sum(m.nrows() for m in mats)
    out = fmpz_mat(total, ncols)
    off = 0
    for m in mats:
        rows = m.tolist()
        for i in range(m.nrows()):
            r = rows[i]
            for j in range(ncols):
                if r[j]:
                    out[off + i, j] = r[j]
        off += m.nrows()
    return out


def block_diag(mats: Sequence[fmpz_mat]) -> fmpz_mat:
    r = sum(m.nrows() for m in mats)
    c = sum(m.ncols() for m in mats)
    out = fmpz_mat(r, c)
    ro = co = 0
    for m in mats:
        rows = m.tolist()
        for i in range(m.nrows()):
            for j in range(m.ncols()):
                if rows[i][j]:
                    out[ro + i, co + j] = rows[i][j]
        ro += m.nrows()
        co += m.ncols()
    return out


def select_columns(m: fmpz_mat, idx: Iterable[int]) -> fmpz_mat:
    idx = list(idx)
    rows = m.tolist()
    out = fmpz_mat(m.nrows(), len(idx))
    for i in range(m.nrows()):
        for k, j in enumerate(idx):
            if rows[i][j]:
                out[i, k] = rows[i][j]
    return out


def select_rows(m: fmpz_mat, idx: Iterable[int]) -> fmpz_mat:
    idx = list(idx)
    rows = m.tolist()
    out = fmpz_mat(len(idx), m.ncols())
    for k, i in enumerate(idx):
        for j in range(m.ncols()):
            if rows[i][j]:
                out[k, j] = rows[i][j]
    return out


def reduce_mod(m: fmpz_mat, modulus: int) -> fmpz_mat:
    """Entrywise residues in [0, modulus)."""
    return fmpz_mat([[int(x) % modulus for x in row] for row in m.tolist()]) if m.nrows() and m.ncols() else fmpz_mat(m.nrows(), m.ncols())


def is_zero_mod(m: fmpz_mat, modulus: int) -> bool:
    return all(int(x) % modulus == 0 for x in m.entries())


def mod_p(m: fmpz_mat, p: int) -> nmod_mat:
    if m.nrows() == 0 or m.ncols() == 0:
        return nmod_mat(m.nrows(), m.ncols(), [], p)
    return nmod_mat(m, p)


def rank_mod(m: fmpz_mat, p: int) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return nmod_mat(m, p).rank()


def rank_q(m: fmpz_mat) -> int:
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return m.rank()


def nmod_to_fmpz(m: nmod_mat) -> fmpz_mat:
    if m.nrows() == 0 or m.ncols() == 0:
        return fmpz_mat(m.nrows(), m.ncols())
    return fmpz_mat([[int(x) for x in row] for row in m.tolist()])


def pivot_columns_mod(m: fmpz_mat, p: int) -> list[int]:
    """Indices of columns forming a maximal independent set modulo p."""
    if m.nrows() == 0 or m.ncols() == 0:
        return []
    rref, rank = nmod_mat(m, p).rref()
    rows = rref.tolist()
    piv = []
    for i in range(rank):
        for j, x in enumerate(rows[i]):
            if int(x):
                piv.append(j)
                break
    return piv


def det_unit_mod(m: fmpz_mat, p: int) -> bool:
    """True when the square matrix is invertible modulo p."""
    if m.nrows() != m.ncols():
        return False
    if m.nrows() == 0:
        return True
    return int(nmod_mat(m, p).det()) != 0


def fmpq_to_fmpz(q: fmpq_mat) -> fmpz_mat | None:
    num, den = q.numer_denom()
    if int(den) == 1:
        return num
    return None


def equal(a: fmpz_mat, b: fmpz_mat) -> bool:
    return a.nrows() == b.nrows() and a.ncols() == b.ncols() and (a.nrows() == 0 or a.ncols() == 0 or a == b)


def matmul(a: fmpz_mat, b: fmpz_mat) -> fmpz_mat:
    if a.ncols() == 0 or a.nrows() == 0 or b.ncols() == 0:
        return fmpz_mat(a.nrows(), b.ncols())
    return a * b
