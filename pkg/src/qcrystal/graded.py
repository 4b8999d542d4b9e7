"""Generic machinery shared by U_q^-, V(lambda) and tensor products.

A :class:`GradedModule` is a module truncated at a depth, graded by
``alpha`` in Q_+ (the weight is ``lam - alpha``).  Subclasses supply, per
weight, a basis size, the matrices of ``f_i`` (raising alpha) and of the
raising operator whose kernel defines i-strings (``e_i`` on modules,
``e_i'`` on U_q^-), and the Gram matrix of the invariant form.

From that data this module computes i-string decompositions, the Kashiwara
operators as matrices, and the crystal lattice and crystal generated from
the lowest grade by the f~_i.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .cartan import BorcherdsCartanDatum, WeightPoint, pairing_vec, roots_up_to
from .crystal import CrystalError, CrystalGraph, CrystalNode, DepthInsufficient, alpha_tag, phi_value
from .linalg import (
    LatticeBasis,
    QMatrix,
    SpanDeficient,
    inverse,
    kernel_basis,
    matmul,
    matvec,
    rank,
    rational_rank,
    vec_is_zero,
)
from .qarith import ONE, ZERO, ScalarQ, as_scalar, qint_factorial


class ReconstructionFailed(ArithmeticError):
    """An i-string decomposition failed to reproduce its input."""


def divided_factor(i: int, n: int, datum: BorcherdsCartanDatum) -> ScalarQ:
    """Scalar turning f_i^n into f_i^{(n)}."""
    if n < 0:
        return ZERO
    if datum.is_real(i):
        return qint_factorial(n, i, datum).inverse()
    return ONE


def shift(alpha: tuple, i: int, k: int) -> Optional[tuple]:
    out = list(alpha)
    out[i] += k
    if out[i] < 0:
        return None
    return tuple(out)


class GradedModule:
    """Truncated Q_+-graded module; see module docstring."""

    kind = "module"

    def __init__(self, datum: BorcherdsCartanDatum, depth: int, lam: Optional[Sequence[int]] = None):
        if depth < 0:
            raise ValueError("depth must be non-negative")
        self.datum = datum
        self.depth = depth
        self.n = datum.n
        self.lam = tuple(lam) if lam is not None else (0,) * datum.n
        self.alphas = roots_up_to(self.n, depth)
        self._dims: Dict[tuple, int] = {}
        self._fpow: Dict[tuple, QMatrix] = {}
        self._strings: Dict[tuple, tuple] = {}
        self._et: Dict[tuple, QMatrix] = {}
        self._ft: Dict[tuple, QMatrix] = {}
        self._kernels: Dict[tuple, list] = {}

    # -- to be supplied by subclasses ----------------------------------------

    def dim(self, alpha) -> int:
        raise NotImplementedError

    def f_matrix(self, i: int, alpha) -> QMatrix:
        """Matrix of f_i from grade alpha to alpha + alpha_i."""
        raise NotImplementedError

    def e_matrix(self, i: int, alpha) -> QMatrix:
        """Matrix of the raising operator from alpha to alpha - alpha_i."""
        raise NotImplementedError

    def gram(self, alpha) -> QMatrix:
        raise NotImplementedError

    # -- helpers ----------------------------------------------------------------

    def in_range(self, alpha) -> bool:
        return alpha is not None and all(k >= 0 for k in alpha) and sum(alpha) <= self.depth

    def weight(self, alpha) -> WeightPoint:
        return WeightPoint(self.lam, tuple(alpha))

    def pairing(self, i: int, alpha) -> int:
        return pairing_vec(self.lam, alpha, i, self.datum)

    def require(self, alpha) -> None:
        if not self.in_range(alpha):
            raise DepthInsufficient(f"grade {alpha} is beyond depth {self.depth}")

    def zero_map(self, src, dst) -> QMatrix:
        return QMatrix.zeros(self.dim(dst) if self.in_range(dst) else 0, self.dim(src))

    def fdiv(self, i: int, alpha, n: int) -> QMatrix:
        """Matrix of f_i^{(n)} from alpha to alpha + n alpha_i."""
        key = (i, tuple(alpha), n)
        m = self._fpow.get(key)
        if m is not None:
            return m
        d = self.dim(alpha)
        if n == 0:
            m = QMatrix.identity(d)
        else:
            target = shift(alpha, i, n)
            self.require(target)
            m = QMatrix.identity(d)
            cur = tuple(alpha)
            for _ in range(n):
                m = matmul(self.f_matrix(i, cur), m)
                cur = shift(cur, i, 1)
            c = divided_factor(i, n, self.datum)
            if c != ONE:
                m.data = [[c * x if x else ZERO for x in r] for r in m.data]
        self._fpow[key] = m
        return m

    def e_kernel(self, i: int, alpha) -> List[list]:
        key = (i, tuple(alpha))
        k = self._kernels.get(key)
        if k is None:
            d = self.dim(alpha)
            if alpha[i] == 0 or d == 0:
                k = [[ONE if r == c else ZERO for r in range(d)] for c in range(d)]
            else:
                k = kernel_basis(self.e_matrix(i, alpha))
            self._kernels[key] = k
        return k

    # -- i-strings ----------------------------------------------------------------

    def string_data(self, i: int, alpha):
        """Blocks (n, kernel basis K_n at alpha - n alpha_i) and the inverse of
        the assembled map (c_n) -> sum_n f_i^{(n)} K_n c_n.

        Blocks on which f_i^{(n)} vanishes are dropped (those string
        components are zero by convention); a partially degenerate block
        means the data is inconsistent.
        """
        key = (i, tuple(alpha))
        hit = self._strings.get(key)
        if hit is not None:
            return hit
        alpha = tuple(alpha)
        d = self.dim(alpha)
        blocks = []
        cols: List[list] = []
        for n in range(alpha[i] + 1):
            beta = shift(alpha, i, -n)
            if self.dim(beta) == 0:
                continue
            K = self.e_kernel(i, beta)
            if not K:
                continue
            F = self.fdiv(i, beta, n)
            images = [matvec(F, v) for v in K]
            if all(vec_is_zero(v) for v in images):
                continue
            if rank(QMatrix.from_columns(images, rows=d)) != len(K):
                raise CrystalError(f"f_{i}^({n}) is neither injective nor zero on ker e_{i} at {beta}")
            blocks.append((n, K))
            cols.extend(images)
        if len(cols) != d:
            raise ReconstructionFailed(f"{i}-string blocks give {len(cols)} vectors in a {d}-dimensional grade {alpha}")
        minv = inverse(QMatrix.from_columns(cols, rows=d)) if d else QMatrix.zeros(0, 0)
        out = (blocks, minv)
        self._strings[key] = out
        return out

    def istring(self, i: int, alpha, v: Sequence[ScalarQ]) -> list:
        """[(n, u_n)] with v = sum f_i^{(n)} u_n and u_n in ker e at alpha - n alpha_i."""
        blocks, minv = self.string_data(i, alpha)
        c = matvec(minv, v)
        out, pos = [], 0
        for n, K in blocks:
            coeffs = c[pos : pos + len(K)]
            pos += len(K)
            beta = shift(tuple(alpha), i, -n)
            u = [ZERO] * self.dim(beta)
            for a, kv in zip(coeffs, K):
                if a:
                    u = [x + a * y if y else x for x, y in zip(u, kv)]
            if not vec_is_zero(u):
                out.append((n, u))
        total = [ZERO] * self.dim(alpha)
        for n, u in out:
            w = matvec(self.fdiv(i, shift(tuple(alpha), i, -n), n), u)
            total = [x + y for x, y in zip(total, w)]
        if total != [as_scalar(x) for x in v]:
            raise ReconstructionFailed(f"{i}-string decomposition does not reconstruct the input at {alpha}")
        return out

    def _tilde(self, i: int, alpha, step: int) -> QMatrix:
        alpha = tuple(alpha)
        target = shift(alpha, i, step)
        d = self.dim(alpha)
        if target is None:
            return QMatrix.zeros(0, d)
        self.require(target)
        dt = self.dim(target)
        blocks, minv = self.string_data(i, alpha)
        cols: List[list] = []
        for n, K in blocks:
            m = n + step
            if m < 0:
                cols.extend([[ZERO] * dt for _ in K])
                continue
            F = self.fdiv(i, shift(alpha, i, -n), m)
            cols.extend(matvec(F, v) for v in K)
        if not cols:
            return QMatrix.zeros(dt, d)
        return matmul(QMatrix.from_columns(cols, rows=dt), minv)

    def e_tilde(self, i: int, alpha) -> QMatrix:
        key = (i, tuple(alpha))
        m = self._et.get(key)
        if m is None:
            m = self._et[key] = self._tilde(i, alpha, -1)
        return m

    def f_tilde(self, i: int, alpha) -> QMatrix:
        key = (i, tuple(alpha))
        m = self._ft.get(key)
        if m is None:
            m = self._ft[key] = self._tilde(i, alpha, +1)
        return m

    def bilinear(self, alpha, u, v) -> ScalarQ:
        g = self.gram(alpha)
        gv = matvec(g, v)
        acc = ZERO
        for a, b in zip(u, gv):
            if a and b:
                acc = acc + a * b
        return acc


# ---------------------------------------------------------------------------
# crystal lattices
# ---------------------------------------------------------------------------


def lift(lattice: LatticeBasis, residue: Sequence[Fraction]) -> list:
    """The vector sum_k residue[k] * lattice_k."""
    out = [ZERO] * lattice.dim
    for a, vec in zip(residue, lattice.vectors):
        if a:
            c = as_scalar(a)
            out = [x + c * y if y else x for x, y in zip(out, vec)]
    return out


def is_zero_residue(r) -> bool:
    return all(x == 0 for x in r)


class CrystalData:
    """Crystal lattice and crystal of a graded module, grade by grade.

    ``lattices[alpha]`` is an A_0-basis of L at that grade; ``B[alpha]`` is
    the sorted list of residue vectors (coordinates in that basis) forming
    the crystal.
    """

    def __init__(self, module: GradedModule, lattices: Dict[tuple, LatticeBasis], B: Dict[tuple, list], ids: Optional[Dict[tuple, list]] = None):
        self.module = module
        self.lattices = lattices
        self.B = B
        self.ids = ids or {a: [f"{alpha_tag(a)}#{k}" for k in range(len(bs))] for a, bs in B.items()}
        self._index = {a: {r: k for k, r in enumerate(bs)} for a, bs in B.items()}

    @property
    def depth(self) -> int:
        return self.module.depth

    def lift(self, alpha, k: int) -> list:
        return lift(self.lattices[tuple(alpha)], self.B[tuple(alpha)][k])

    def residue(self, alpha, v) -> tuple:
        return self.lattices[tuple(alpha)].residue(v)

    def locate(self, alpha, residue) -> Optional[int]:
        return self._index[tuple(alpha)].get(tuple(residue))

    def node_id(self, alpha, k: int) -> str:
        return self.ids[tuple(alpha)][k]

    def apply_tilde(self, op: str, i: int, alpha, k: int):
        """(target alpha, residue) of e~_i or f~_i applied to node k at alpha."""
        m = self.module
        alpha = tuple(alpha)
        step = -1 if op == "e" else 1
        target = shift(alpha, i, step)
        if target is None:
            return None, None
        if not m.in_range(target):
            raise DepthInsufficient(f"f~_{i} from {alpha} leaves depth {m.depth}")
        mat = m.e_tilde(i, alpha) if op == "e" else m.f_tilde(i, alpha)
        v = matvec(mat, self.lift(alpha, k))
        if m.dim(target) == 0:
            return target, ()
        return target, self.residue(target, v)

    def graph(self, phi_mode: str = "module", meta: Optional[dict] = None, strict: bool = True) -> CrystalGraph:
        return assemble_graph(self, phi_mode=phi_mode, meta=meta, strict=strict)


def bfs_crystal(module: GradedModule) -> CrystalData:
    """Crystal lattice generated from the grade-0 unit vector by the f~_i.

    L_alpha = sum_i f~_i L_{alpha - alpha_i}; B_alpha = nonzero residues of
    f~_i b for b in B_{alpha - alpha_i}.
    """
    m = module
    n = m.n
    zero = (0,) * n
    if m.dim(zero) != 1:
        raise CrystalError("grade 0 must be one-dimensional")
    lattices = {zero: LatticeBasis([[ONE]], 1)}
    B = {zero: [(Fraction(1),)]}
    for alpha in m.alphas[1:]:
        d = m.dim(alpha)
        gens, cands = [], []
        for i in range(n):
            beta = shift(alpha, i, -1)
            if beta is None or m.dim(beta) == 0:
                continue
            ft = m.f_tilde(i, beta)
            gens.extend(matvec(ft, v) for v in lattices[beta].vectors)
            cands.extend(matvec(ft, lift(lattices[beta], b)) for b in B[beta])
        if d == 0:
            lattices[alpha] = LatticeBasis([], 0)
            B[alpha] = []
            continue
        try:
            lat = LatticeBasis.from_spanning(gens, d)
        except SpanDeficient as exc:
            raise CrystalError(f"f~-images do not span grade {alpha}: {exc}") from exc
        res = {lat.residue(v) for v in cands}
        res = sorted(r for r in res if not is_zero_residue(r))
        if len(res) != d or rational_rank(res) != d:
            raise CrystalError(f"grade {alpha}: {len(res)} residues for dimension {d}")
        lattices[alpha] = lat
        B[alpha] = res
    return CrystalData(m, lattices, B)


def assemble_graph(data: CrystalData, phi_mode: str = "module", meta: Optional[dict] = None, strict: bool = True) -> CrystalGraph:
    """Edges from residues of f~_i lifts; eps_i by e~-iteration; phi by convention.

    ``phi_mode`` is "module" (imaginary phi is 0 or inf by the pairing sign)
    or "binf" (imaginary phi is inf).  With ``strict`` any residue outside
    B union {0} raises :class:`CrystalError`.
    """
    m = data.module
    datum = m.datum
    nodes, edges = [], []
    e_target: Dict[tuple, Optional[tuple]] = {}

    def e_step(alpha, k, i):
        key = (alpha, k, i)
        if key in e_target:
            return e_target[key]
        target, r = data.apply_tilde("e", i, alpha, k)
        out = None
        if target is not None and r and not is_zero_residue(r):
            j = data.locate(target, r)
            if j is None:
                if strict:
                    raise CrystalError(f"e~_{i} of node {data.node_id(alpha, k)} has residue {r} outside B")
            else:
                out = (target, j)
        e_target[key] = out
        return out

    for alpha in m.alphas:
        for k, res in enumerate(data.B.get(alpha, [])):
            eps, phi = [], []
            for i in range(m.n):
                cnt, cur = 0, (alpha, k)
                while True:
                    nxt = e_step(cur[0], cur[1], i)
                    if nxt is None:
                        break
                    cnt += 1
                    cur = nxt
                eps.append(cnt)
                phi.append(phi_value(datum, i, cnt, m.weight(alpha), imaginary_always_inf=(phi_mode == "binf")))
            nodes.append(CrystalNode(data.node_id(alpha, k), alpha, m.lam, tuple(eps), tuple(phi), res))
            for i in range(m.n):
                target = shift(alpha, i, 1)
                if not m.in_range(target):
                    continue
                _, r = data.apply_tilde("f", i, alpha, k)
                if not r or is_zero_residue(r):
                    continue
                j = data.locate(target, r)
                if j is None:
                    if strict:
                        raise CrystalError(f"f~_{i} of node {data.node_id(alpha, k)} has residue {r} outside B")
                    continue
                edges.append((data.node_id(alpha, k), data.node_id(target, j), i))
    info = {"datum": datum.digest(), "labels": list(datum.labels), "depth": m.depth, "rank": m.n}
    info.update(meta or {})
    return CrystalGraph(nodes, edges, info)
