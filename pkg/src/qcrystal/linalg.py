"""Linear algebra over Q(q) and over the discrete valuation ring A_0.

Vectors are plain lists of :class:`~qcrystal.qarith.ScalarQ`; matrices are
:class:`QMatrix` (row-major lists).  Pivot rules are fixed so every basis
produced here is reproducible:

* Gaussian elimination sweeps columns left to right and pivots on the lowest
  row index with a nonzero entry.
* Valuation-aware elimination over A_0 pivots on the entry of minimal
  ``val0`` in the remaining block, ties broken by lowest column index and
  then lowest row index.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .qarith import ONE, ZERO, NotRegularAtZero, ScalarQ, as_scalar

Vector = List[ScalarQ]


class Inconsistent(ArithmeticError):
    """A linear system has no solution."""


class SpanDeficient(ArithmeticError):
    """Spanning vectors do not span the ambient Q(q)-space."""


class NotInLattice(ArithmeticError):
    """A vector has a coordinate with negative q-adic valuation."""


class QMatrix:
    """Dense matrix of ScalarQ entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Sequence[Sequence], cols: Optional[int] = None):
        self.data = [[as_scalar(x) for x in row] for row in data]
        self.rows = len(self.data)
        if cols is None:
            cols = len(self.data[0]) if self.data else 0
        self.cols = cols
        for row in self.data:
            if len(row) != cols:
                raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        m = cls.__new__(cls)
        m.rows, m.cols = rows, cols
        m.data = [[ZERO] * cols for _ in range(rows)]
        return m

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        m = cls.zeros(n, n)
        for k in range(n):
            m.data[k][k] = ONE
        return m

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: Optional[int] = None) -> "QMatrix":
        if rows is None:
            rows = len(columns[0]) if columns else 0
        m = cls.zeros(rows, len(columns))
        for j, col in enumerate(columns):
            for i, x in enumerate(col):
                m.data[i][j] = x
        return m

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    def __setitem__(self, idx, value):
        i, j = idx
        self.data[i][j] = as_scalar(value)

    def row(self, i: int) -> Vector:
        return list(self.data[i])

    def column(self, j: int) -> Vector:
        return [r[j] for r in self.data]

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "QMatrix":
        m = QMatrix.zeros(self.cols, self.rows)
        for i, r in enumerate(self.data):
            for j, x in enumerate(r):
                m.data[j][i] = x
        return m

    def __matmul__(self, other):
        if isinstance(other, QMatrix):
            return matmul(self, other)
        return matvec(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, QMatrix) and self.rows == other.rows and self.cols == other.cols and self.data == other.data

    def is_zero(self) -> bool:
        return all(not x for r in self.data for x in r)

    def copy(self) -> "QMatrix":
        m = QMatrix.zeros(self.rows, self.cols)
        m.data = [list(r) for r in self.data]
        return m

    def bar(self) -> "QMatrix":
        m = QMatrix.zeros(self.rows, self.cols)
        m.data = [[x.bar() for x in r] for r in self.data]
        return m

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self.data)
        return f"QMatrix({self.rows}x{self.cols}: [{body}])"


# ---------------------------------------------------------------------------
# basic products
# ---------------------------------------------------------------------------


def matvec(m: QMatrix, v: Sequence[ScalarQ]) -> Vector:
    out = []
    for r in m.data:
        acc = ZERO
        for a, x in zip(r, v):
            if a and x:
                acc = acc + a * x
        out.append(acc)
    return out


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch {a.rows}x{a.cols} @ {b.rows}x{b.cols}")
    out = QMatrix.zeros(a.rows, b.cols)
    bt = b.data
    for i, r in enumerate(a.data):
        orow = out.data[i]
        for k, x in enumerate(r):
            if not x:
                continue
            brow = bt[k]
            for j, y in enumerate(brow):
                if y:
                    orow[j] = orow[j] + x * y
    return out


def vec_add(u: Sequence[ScalarQ], v: Sequence[ScalarQ]) -> Vector:
    return [a + b for a, b in zip(u, v)]


def vec_sub(u: Sequence[ScalarQ], v: Sequence[ScalarQ]) -> Vector:
    return [a - b for a, b in zip(u, v)]


def vec_scale(c, v: Sequence[ScalarQ]) -> Vector:
    c = as_scalar(c)
    if not c:
        return [ZERO] * len(v)
    return [c * x if x else ZERO for x in v]


def vec_is_zero(v: Sequence[ScalarQ]) -> bool:
    return all(not x for x in v)


def zero_vec(n: int) -> Vector:
    return [ZERO] * n


def unit_vec(n: int, k: int) -> Vector:
    v = [ZERO] * n
    v[k] = ONE
    return v


def bilinear(u: Sequence[ScalarQ], gram: QMatrix, v: Sequence[ScalarQ]) -> ScalarQ:
    gv = matvec(gram, v)
    acc = ZERO
    for a, b in zip(u, gv):
        if a and b:
            acc = acc + a * b
    return acc


def block_columns(blocks: Sequence[QMatrix], rows: int) -> QMatrix:
    cols = []
    for b in blocks:
        cols.extend(b.columns())
    return QMatrix.from_columns(cols, rows=rows)


# ---------------------------------------------------------------------------
# Gaussian elimination over Q(q)
# ---------------------------------------------------------------------------


def rref(m: QMatrix):
    """Reduced row echelon form and pivot columns."""
    a = [list(r) for r in m.data]
    rows, cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = None
        for k in range(r, rows):
            if a[k][c]:
                p = k
                break
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        inv = a[r][c].inverse()
        a[r] = [x * inv if x else ZERO for x in a[r]]
        pr = a[r]
        for k in range(rows):
            if k != r:
                f = a[k][c]
                if f:
                    rk = a[k]
                    for j in range(c, cols):
                        if pr[j]:
                            rk[j] = rk[j] - f * pr[j]
        pivots.append(c)
        r += 1
    out = QMatrix.zeros(rows, cols)
    out.data = a
    return out, pivots


def rank(m: QMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def _normalize_sign(v: Vector) -> Vector:
    for x in v:
        if x:
            return v if x.sign() > 0 else [-y for y in v]
    return v


def kernel_basis(m: QMatrix) -> List[Vector]:
    """Basis of the right null space ``{x : m x = 0}``.

    One vector per free column, normalized so its first nonzero entry has a
    positive leading rational coefficient.
    """
    n = m.cols
    if m.rows == 0:
        return [unit_vec(n, k) for k in range(n)]
    r, pivots = rref(m)
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for row, pc in enumerate(pivots):
            x = r.data[row][f]
            if x:
                v[pc] = -x
        out.append(_normalize_sign(v))
    return out


def solve(m: QMatrix, b: Sequence[ScalarQ]) -> Vector:
    """One solution of ``m x = b`` (free variables set to zero)."""
    aug = QMatrix.zeros(m.rows, m.cols + 1)
    for i in range(m.rows):
        aug.data[i] = list(m.data[i]) + [as_scalar(b[i])]
    r, pivots = rref(aug)
    if m.cols in pivots:
        raise Inconsistent("linear system has no solution")
    x = [ZERO] * m.cols
    for row, pc in enumerate(pivots):
        x[pc] = r.data[row][m.cols]
    return x


def inverse(m: QMatrix) -> QMatrix:
    n = m.rows
    if m.cols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = QMatrix.zeros(n, 2 * n)
    for i in range(n):
        aug.data[i] = list(m.data[i]) + [ONE if j == i else ZERO for j in range(n)]
    r, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    out = QMatrix.zeros(n, n)
    out.data = [row[n:] for row in r.data]
    return out


def independent_rows(m: QMatrix) -> List[int]:
    """Greedy lexicographically-first maximal set of independent rows."""
    chosen: List[int] = []
    basis: List[tuple] = []  # (pivot column, normalized row)
    for idx, row in enumerate(m.data):
        v = list(row)
        for pc, b in basis:
            f = v[pc]
            if f:
                v = [x - f * y if y else x for x, y in zip(v, b)]
        pc = next((c for c, x in enumerate(v) if x), None)
        if pc is None:
            continue
        inv = v[pc].inverse()
        basis.append((pc, [x * inv if x else ZERO for x in v]))
        chosen.append(idx)
    return chosen


def rank_at(m: QMatrix, x) -> int:
    """Rank of the rational matrix obtained by substituting q = x."""
    a = [[e.evaluate(x) for e in r] for r in m.data]
    rows, cols = m.rows, m.cols
    rk = 0
    for c in range(cols):
        p = next((k for k in range(rk, rows) if a[k][c] != 0), None)
        if p is None:
            continue
        a[rk], a[p] = a[p], a[rk]
        piv = a[rk][c]
        for k in range(rk + 1, rows):
            f = a[k][c] / piv
            if f:
                a[k] = [y - f * z for y, z in zip(a[k], a[rk])]
        rk += 1
        if rk == rows:
            break
    return rk


def solve_rational(rows: List[List[Fraction]], rhs: List[Fraction], nvars: int):
    """Exact solve over Q.  Returns (particular solution or None, null-space basis)."""
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(nvars):
        p = next((k for k in range(r, len(a)) if a[k][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        pr = a[r]
        for k in range(len(a)):
            if k != r and a[k][c] != 0:
                f = a[k][c]
                a[k] = [x - f * y for x, y in zip(a[k], pr)]
        pivots.append(c)
        r += 1
    for k in range(r, len(a)):
        if a[k][nvars] != 0:
            return None, []
    x = [Fraction(0)] * nvars
    for row, pc in enumerate(pivots):
        x[pc] = a[row][nvars]
    null = []
    for f in (c for c in range(nvars) if c not in pivots):
        v = [Fraction(0)] * nvars
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -a[row][f]
        null.append(v)
    return x, null


# ---------------------------------------------------------------------------
# A_0-lattices
# ---------------------------------------------------------------------------


def dvr_lattice_basis(spanning: Sequence[Sequence[ScalarQ]], dim: Optional[int] = None, require_full: bool = True):
    """A_0-basis of the A_0-module generated by ``spanning``.

    Returns ``(basis, coords)`` where ``coords`` is a QMatrix whose row ``s``
    expresses ``spanning[s]`` in the basis; every entry has val0 >= 0.
    Raises :class:`SpanDeficient` if ``require_full`` and the vectors do not
    span the ambient ``dim``-dimensional space.
    """
    spanning = [list(v) for v in spanning]
    if dim is None:
        dim = len(spanning[0]) if spanning else 0
    rows = [list(v) for v in spanning]
    # exprs[s][k]: multiplier of basis[k] already subtracted from row s
    exprs: List[dict] = [dict() for _ in rows]
    alive = [s for s, v in enumerate(rows) if not vec_is_zero(v)]
    used_cols: set = set()
    basis: List[Vector] = []
    while alive:
        best = None
        for s in alive:
            for c in range(dim):
                if c in used_cols:
                    continue
                x = rows[s][c]
                if not x:
                    continue
                key = (x.e, c, s)
                if best is None or key < best[0]:
                    best = (key, s, c)
        if best is None:
            break
        _, p, c = best
        k = len(basis)
        pivot_row = rows[p]
        basis.append(list(pivot_row))
        exprs[p][k] = ONE
        inv = pivot_row[c].inverse()
        used_cols.add(c)
        nxt = []
        for s in alive:
            if s == p:
                continue
            f = rows[s][c]
            if f:
                m = f * inv
                rows[s] = [x - m * y if y else x for x, y in zip(rows[s], pivot_row)]
                exprs[s][k] = exprs[s].get(k, ZERO) + m
            if not vec_is_zero(rows[s]):
                nxt.append(s)
        alive = nxt
    if require_full and len(basis) < dim:
        raise SpanDeficient(f"spanning set has rank {len(basis)} < {dim}")
    coords = QMatrix.zeros(len(spanning), len(basis))
    for s, ex in enumerate(exprs):
        for k, x in ex.items():
            coords.data[s][k] = x
    return basis, coords


class LatticeBasis:
    """A full-rank A_0-lattice in a finite-dimensional Q(q)-space."""

    __slots__ = ("vectors", "dim", "_inv")

    def __init__(self, vectors: Sequence[Sequence[ScalarQ]], dim: Optional[int] = None):
        self.vectors = [list(v) for v in vectors]
        self.dim = len(self.vectors) if dim is None else dim
        if len(self.vectors) != self.dim:
            raise SpanDeficient(f"{len(self.vectors)} lattice vectors in a {self.dim}-dimensional space")
        self._inv = inverse(QMatrix.from_columns(self.vectors, rows=self.dim)) if self.dim else QMatrix.zeros(0, 0)

    @classmethod
    def from_spanning(cls, spanning, dim: int) -> "LatticeBasis":
        if dim == 0:
            return cls([], 0)
        basis, _ = dvr_lattice_basis(spanning, dim=dim)
        return cls(basis, dim)

    def coords(self, v: Sequence[ScalarQ]) -> Vector:
        return matvec(self._inv, v) if self.dim else []

    def contains(self, v: Sequence[ScalarQ]) -> bool:
        return all(x.e >= 0 for x in self.coords(v) if x)

    def valuation(self, v: Sequence[ScalarQ]):
        """min val0 over lattice coordinates (inf for the zero vector)."""
        return min((x.val0() for x in self.coords(v)), default=math.inf)

    def residue(self, v: Sequence[ScalarQ]) -> tuple:
        return residue_of_coords(self.coords(v))

    def residue_matrix_of(self, vectors) -> list:
        return [self.residue(v) for v in vectors]


def residue_of_coords(coords: Sequence[ScalarQ]) -> tuple:
    out = []
    for x in coords:
        if x and x.e < 0:
            raise NotInLattice(f"coordinate {x} has val0 {x.e} < 0")
        out.append(x.eval0() if x else Fraction(0))
    return tuple(out)


def residue_mod_q(v: Sequence[ScalarQ], basis) -> tuple:
    """eval0 of the coordinates of v in an A_0-lattice basis."""
    if not isinstance(basis, LatticeBasis):
        basis = LatticeBasis(basis)
    return basis.residue(v)


def rational_rank(rows: Iterable[Sequence[Fraction]]) -> int:
    a = [list(r) for r in rows]
    if not a:
        return 0
    rk = 0
    cols = len(a[0])
    for c in range(cols):
        p = next((k for k in range(rk, len(a)) if a[k][c] != 0), None)
        if p is None:
            continue
        a[rk], a[p] = a[p], a[rk]
        for k in range(rk + 1, len(a)):
            if a[k][c] != 0:
                f = a[k][c] / a[rk][c]
                a[k] = [y - f * z for y, z in zip(a[k], a[rk])]
        rk += 1
    return rk
