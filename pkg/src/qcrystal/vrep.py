"""Irreducible highest-weight modules V(lambda).

A word ``(j_1, ..., j_r)`` stands for f_{j_1} ... f_{j_r} v_lambda.  Weight
spaces are spans of words modulo the radical of the contravariant form
(v_lambda, v_lambda) = 1, (f_i u, v) = (u, q_i^{-1} K_i e_i v).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .cartan import BorcherdsCartanDatum, WeightPoint, is_dominant, pairing_vec, roots_up_to
from .crystal import CrystalError, CrystalGraph
from .freealg import FVector, Word, _word_index, words_of_weight
from .graded import CrystalData, GradedModule, bfs_crystal, shift
from .linalg import QMatrix, independent_rows, inverse, matmul, matvec, rank_at
from .qarith import ONE, ZERO, ScalarQ, qint, qpow


class NotDominant(ValueError):
    """lambda has a negative pairing."""


def check_dominant(lam: Sequence[int], datum: BorcherdsCartanDatum) -> tuple:
    lam = tuple(int(x) for x in lam)
    if len(lam) != datum.n:
        raise ValueError(f"lambda has {len(lam)} entries for a rank-{datum.n} datum")
    if not is_dominant(lam):
        raise NotDominant(f"lambda = {lam} is not dominant")
    return lam


def e_on_word(i: int, w: Word, lam: tuple, datum: BorcherdsCartanDatum) -> List[tuple]:
    """e_i (w v_lambda) as [(word, coefficient)].

    Commuting e_i past f_{j_p} = f_i produces [<h_i, mu_p>]_i where mu_p is
    the weight of the tail f_{j_{p+1}} ... v_lambda.
    """
    out = []
    alpha = [0] * datum.n
    for j in w:
        alpha[j] += 1
    # weight of the tail after position p: lam - sum_{t > p} alpha_{j_t}
    tail = [0] * datum.n
    tails = [None] * len(w)
    for p in range(len(w) - 1, -1, -1):
        tails[p] = tuple(tail)
        tail[w[p]] += 1
    for p, j in enumerate(w):
        if j == i:
            c = qint(pairing_vec(lam, tails[p], i, datum), i, datum)
            if c:
                out.append((w[:p] + w[p + 1 :], c))
    return out


def apply_e_fvector(i: int, v: FVector, lam: tuple, datum: BorcherdsCartanDatum) -> FVector:
    out: Dict[Word, ScalarQ] = {}
    for w, c in v.terms.items():
        for w2, x in e_on_word(i, w, lam, datum):
            out[w2] = out.get(w2, ZERO) + c * x
    return FVector(out)


@lru_cache(maxsize=None)
def contravariant_word_gram(datum: BorcherdsCartanDatum, lam: tuple, alpha: tuple) -> QMatrix:
    """(w v, w' v) on all words of weight alpha."""
    words = words_of_weight(alpha)
    m = QMatrix.zeros(len(words), len(words))
    if not any(alpha):
        m.data[0][0] = ONE
        return m
    for a, w in enumerate(words):
        i = w[0]
        beta = shift(alpha, i, -1)
        sub = contravariant_word_gram(datum, lam, beta)
        idx = _word_index(beta)
        ra = idx[w[1:]]
        # q_i^{-1} K_i acts on the image (weight lam - beta) by q_i^{-1 + <h_i, lam - beta>}
        k = qpow(datum.s[i] * (-1 + pairing_vec(lam, beta, i, datum)))
        for b in range(a, len(words)):
            acc = ZERO
            for w2, c in e_on_word(i, words[b], lam, datum):
                x = sub.data[ra][idx[w2]]
                if x:
                    acc = acc + c * x
            if acc:
                acc = acc * k
            m.data[a][b] = acc
            m.data[b][a] = acc
    return m


class VWeightSpace:
    """V(lambda)_{lambda - alpha} as words modulo the form radical."""

    def __init__(self, datum: BorcherdsCartanDatum, lam: tuple, alpha: tuple):
        self.datum = datum
        self.lam = lam
        self.alpha = tuple(alpha)
        self.words = words_of_weight(self.alpha)
        self.index = _word_index(self.alpha)
        full = contravariant_word_gram(datum, lam, self.alpha)
        self.full_gram = full
        self.basis_idx = independent_rows(full)
        self.basis_words = [self.words[k] for k in self.basis_idx]
        self.gram = QMatrix([[full.data[a][b] for b in self.basis_idx] for a in self.basis_idx], cols=len(self.basis_idx))
        if self.basis_idx:
            rows = QMatrix([full.data[a] for a in self.basis_idx], cols=len(self.words))
            self.reduction = matmul(inverse(self.gram), rows)
        else:
            self.reduction = QMatrix.zeros(0, len(self.words))
        if self.basis_idx:
            for i in datum.imaginary_indices:
                if pairing_vec(lam, self.alpha, i, datum) < 0:
                    raise CrystalError(f"imaginary index {i} has negative pairing on a nonzero weight space {self.alpha}")

    @property
    def dim(self) -> int:
        return len(self.basis_idx)

    def coords_of_word(self, w: Word) -> list:
        k = self.index[tuple(w)]
        return [r[k] for r in self.reduction.data]

    def reduce(self, v: FVector) -> list:
        out = [ZERO] * self.dim
        for w, c in v.terms.items():
            k = self.index[w]
            for r, row in enumerate(self.reduction.data):
                x = row[k]
                if x:
                    out[r] = out[r] + c * x
        return out

    def to_fvector(self, coords) -> FVector:
        return FVector({w: c for w, c in zip(self.basis_words, coords)})


@lru_cache(maxsize=None)
def v_basis(lam: tuple, alpha: tuple, datum: BorcherdsCartanDatum) -> VWeightSpace:
    lam = check_dominant(lam, datum)
    return VWeightSpace(datum, lam, tuple(alpha))


class HighestWeightModule(GradedModule):
    """V(lambda) truncated at a depth, with e_i as the string operator."""

    kind = "v"

    def __init__(self, datum: BorcherdsCartanDatum, lam: Sequence[int], depth: int):
        lam = check_dominant(lam, datum)
        super().__init__(datum, depth, lam=lam)
        self._f: Dict[tuple, QMatrix] = {}
        self._e: Dict[tuple, QMatrix] = {}

    def space(self, alpha) -> VWeightSpace:
        return v_basis(self.lam, tuple(alpha), self.datum)

    def dim(self, alpha) -> int:
        if alpha is None or not self.in_range(alpha):
            return 0
        return self.space(alpha).dim

    def gram(self, alpha) -> QMatrix:
        return self.space(alpha).gram

    def f_matrix(self, i: int, alpha) -> QMatrix:
        key = (i, tuple(alpha))
        m = self._f.get(key)
        if m is None:
            target = shift(tuple(alpha), i, 1)
            self.require(target)
            src, dst = self.space(alpha), self.space(target)
            cols = [dst.coords_of_word((i,) + w) for w in src.basis_words]
            m = self._f[key] = QMatrix.from_columns(cols, rows=dst.dim) if cols else QMatrix.zeros(dst.dim, 0)
        return m

    def e_matrix(self, i: int, alpha) -> QMatrix:
        key = (i, tuple(alpha))
        m = self._e.get(key)
        if m is None:
            target = shift(tuple(alpha), i, -1)
            src = self.space(alpha)
            if target is None:
                m = QMatrix.zeros(0, src.dim)
            else:
                dst = self.space(target)
                cols = [dst.reduce(apply_e_fvector(i, FVector.word(w), self.lam, self.datum)) for w in src.basis_words]
                m = QMatrix.from_columns(cols, rows=dst.dim) if cols else QMatrix.zeros(dst.dim, 0)
            self._e[key] = m
        return m

    # -- conveniences on coordinate vectors ------------------------------------

    def apply_e(self, i: int, alpha, v) -> list:
        return matvec(self.e_matrix(i, alpha), v)

    def apply_f(self, i: int, alpha, v) -> list:
        return matvec(self.f_matrix(i, alpha), v)

    def cform(self, alpha, u, v) -> ScalarQ:
        return self.bilinear(alpha, u, v)

    def qKe(self, i: int, alpha, v) -> list:
        """q_i^{-1} K_i e_i v for v at grade alpha."""
        target = shift(tuple(alpha), i, -1)
        w = self.apply_e(i, alpha, v)
        k = qpow(self.datum.s[i] * (-1 + self.pairing(i, target)))
        return [k * x if x else ZERO for x in w]

    def qfKinv(self, i: int, alpha, v) -> list:
        """q_i f_i K_i^{-1} v for v at grade alpha."""
        k = qpow(self.datum.s[i] * (1 - self.pairing(i, alpha)))
        return [k * x if x else ZERO for x in self.apply_f(i, alpha, v)]

    def Qi_op(self, i: int, alpha, v) -> list:
        """f_i^{(n)} u_n -> (n+1) f_i^{(n)} u_n when a_ii = 0, identity otherwise."""
        if self.datum.A[i][i] != 0:
            return list(v)
        out = [ZERO] * self.dim(alpha)
        for n, u in self.istring(i, alpha, v):
            w = matvec(self.fdiv(i, shift(tuple(alpha), i, -n), n), u)
            out = [x + (n + 1) * y if y else x for x, y in zip(out, w)]
        return out

    def pi_lambda(self, p: FVector) -> list:
        """Coordinates of P v_lambda."""
        if not p:
            return []
        return self.space(p.weight(self.n)).reduce(p)

    def to_fvector(self, alpha, coords) -> FVector:
        return self.space(alpha).to_fvector(coords)


# module-level operations on explicit elements


def apply_e(i: int, v: FVector, lam, datum: BorcherdsCartanDatum) -> FVector:
    """e_i on an element given as words acting on v_lambda (not reduced)."""
    return apply_e_fvector(i, v, tuple(lam), datum)


def cform(u: FVector, v: FVector, lam, datum: BorcherdsCartanDatum) -> ScalarQ:
    if not u or not v:
        return ZERO
    a, b = u.weight(datum.n), v.weight(datum.n)
    if a != b:
        return ZERO
    g = contravariant_word_gram(datum, check_dominant(lam, datum), a)
    idx = _word_index(a)
    acc = ZERO
    for w1, c1 in u.terms.items():
        row = g.data[idx[w1]]
        for w2, c2 in v.terms.items():
            x = row[idx[w2]]
            if x:
                acc = acc + c1 * c2 * x
    return acc


def pi_lambda(p: FVector, lam, datum: BorcherdsCartanDatum) -> list:
    lam = check_dominant(lam, datum)
    if not p:
        return []
    return v_basis(lam, p.weight(datum.n), datum).reduce(p)


@lru_cache(maxsize=None)
def _module(datum: BorcherdsCartanDatum, lam: tuple, depth: int) -> HighestWeightModule:
    return HighestWeightModule(datum, lam, depth)


def module(datum: BorcherdsCartanDatum, lam, depth: int) -> HighestWeightModule:
    return _module(datum, check_dominant(lam, datum), depth)


@lru_cache(maxsize=None)
def _crystal_cached(datum: BorcherdsCartanDatum, lam: tuple, depth: int) -> CrystalData:
    return bfs_crystal(module(datum, lam, depth))


def crystal_data(datum: BorcherdsCartanDatum, lam, depth: int) -> CrystalData:
    return _crystal_cached(datum, check_dominant(lam, datum), depth)


def crystal(datum: BorcherdsCartanDatum, lam, depth: int) -> Tuple[CrystalData, CrystalGraph]:
    """Crystal lattice L(lambda) and crystal graph B(lambda) up to depth."""
    data = crystal_data(datum, lam, depth)
    graph = data.graph(phi_mode="module", meta={"lambda": list(data.module.lam)})
    return data, graph


def dims_table(datum: BorcherdsCartanDatum, lam, depth: int) -> List[tuple]:
    """[(alpha, dim V_{lambda-alpha}, #B_{lambda-alpha})] for |alpha| <= depth."""
    data = crystal_data(datum, lam, depth)
    m = data.module
    return [(a, m.dim(a), len(data.B[a])) for a in m.alphas]


def specialized_rank(datum: BorcherdsCartanDatum, lam, alpha, x) -> int:
    """Rank of the full word Gram matrix with q replaced by a rational x."""
    lam = check_dominant(lam, datum)
    return rank_at(contravariant_word_gram(datum, lam, tuple(alpha)), x)


def fn_dimension(mod: GradedModule, i: int, alpha, n: int) -> int:
    """dim (f_i^n M)_{lambda-alpha}: rank of the images of f_i^{(m)} ker e_i, m >= n."""
    from .linalg import rank as _rank

    alpha = tuple(alpha)
    d = mod.dim(alpha)
    if d == 0:
        return 0
    cols = []
    for m in range(n, alpha[i] + 1):
        beta = shift(alpha, i, -m)
        if mod.dim(beta) == 0:
            continue
        F = mod.fdiv(i, beta, m)
        cols.extend(matvec(F, v) for v in mod.e_kernel(i, beta))
    if not cols:
        return 0
    return _rank(QMatrix.from_columns(cols, rows=d))
