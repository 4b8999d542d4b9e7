"""The negative half U_q^-: f-words, e_i' and e_i'', the Kashiwara form,
quotient weight spaces, the projector P_i, i-strings and B(infinity).

A word ``(i_1, ..., i_r)`` stands for the monomial f_{i_1} ... f_{i_r}.
U_q^-_{-alpha} is realized as the span of all words of weight alpha modulo
the radical of the Kashiwara form.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cartan import BorcherdsCartanDatum, roots_up_to
from .crystal import CrystalGraph
from .graded import CrystalData, GradedModule, ReconstructionFailed, bfs_crystal, divided_factor, shift
from .linalg import QMatrix, independent_rows, inverse, matmul, matvec
from .qarith import ONE, ZERO, ScalarQ, as_scalar, qbrace_factorial, qpow

Word = Tuple[int, ...]


class FVector:
    """Finite linear combination of words with ScalarQ coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[dict] = None):
        self.terms: Dict[Word, ScalarQ] = {}
        for w, c in (terms or {}).items():
            c = as_scalar(c)
            if c:
                self.terms[tuple(w)] = c

    @classmethod
    def word(cls, w: Iterable[int], c=ONE) -> "FVector":
        return cls({tuple(w): c})

    @classmethod
    def one(cls) -> "FVector":
        return cls({(): ONE})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "FVector") -> "FVector":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return FVector(out)

    def __sub__(self, other: "FVector") -> "FVector":
        return self + other.scale(-ONE)

    def __neg__(self) -> "FVector":
        return self.scale(-ONE)

    def scale(self, c) -> "FVector":
        c = as_scalar(c)
        return FVector({w: c * x for w, x in self.terms.items()})

    def __rmul__(self, c) -> "FVector":
        return self.scale(c)

    def left_mul(self, prefix: Word, c=ONE) -> "FVector":
        """(c * f_prefix) * self."""
        c = as_scalar(c)
        return FVector({tuple(prefix) + w: c * x for w, x in self.terms.items()})

    def weight(self, n: int) -> Optional[tuple]:
        ws = {tuple(sum(1 for x in w if x == i) for i in range(n)) for w in self.terms}
        if len(ws) > 1:
            raise ValueError("FVector is not homogeneous")
        return ws.pop() if ws else None

    def items(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def bar(self) -> "FVector":
        return FVector({w: c.bar() for w, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, FVector) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "FVector(0)"
        parts = [f"({c})*f{list(w)}" for w, c in self.items()]
        return "FVector(" + " + ".join(parts) + ")"


# ---------------------------------------------------------------------------
# operators on words
# ---------------------------------------------------------------------------


def _eprime_word(i: int, w: Word, datum: BorcherdsCartanDatum, sign: int) -> List[tuple]:
    """e_i' (sign=-1) or e_i'' (sign=+1) on one word: list of (word, exponent)."""
    s = datum.s[i]
    row = datum.A[i]
    out = []
    acc = 0
    for p, j in enumerate(w):
        if j == i:
            out.append((w[:p] + w[p + 1 :], sign * s * acc))
        acc += row[j]
    return out


def eprime(i: int, v: FVector, datum: BorcherdsCartanDatum) -> FVector:
    """e_i' : peel letters with e_i' f_j = q_i^{-a_ij} f_j e_i' + delta_ij."""
    out: Dict[Word, ScalarQ] = {}
    for w, c in v.terms.items():
        for w2, e in _eprime_word(i, w, datum, -1):
            out[w2] = out.get(w2, ZERO) + c * qpow(e)
    return FVector(out)


def edprime(i: int, v: FVector, datum: BorcherdsCartanDatum) -> FVector:
    """e_i'' : e_i'' f_j = q_i^{a_ij} f_j e_i'' + delta_ij."""
    out: Dict[Word, ScalarQ] = {}
    for w, c in v.terms.items():
        for w2, e in _eprime_word(i, w, datum, +1):
            out[w2] = out.get(w2, ZERO) + c * qpow(e)
    return FVector(out)


def eprime_divided(i: int, n: int, v: FVector, datum: BorcherdsCartanDatum) -> FVector:
    """e_i'^{(n)}: plain power for real i, divided by {n}_i! for imaginary i."""
    for _ in range(n):
        v = eprime(i, v, datum)
    if n > 0 and datum.is_imaginary(i):
        v = v.scale(qbrace_factorial(n, i, datum).inverse())
    return v


def divided_power_word(i: int, n: int, datum: BorcherdsCartanDatum) -> FVector:
    """f_i^{(n)} as a multiple of the word (i, ..., i)."""
    if n < 0:
        return FVector()
    return FVector.word((i,) * n, divided_factor(i, n, datum))


def f_divided(i: int, n: int, v: FVector, datum: BorcherdsCartanDatum) -> FVector:
    """f_i^{(n)} * v."""
    if n < 0:
        return FVector()
    return v.left_mul((i,) * n, divided_factor(i, n, datum))


def star(v: FVector) -> FVector:
    """The anti-involution fixing every f_i: reverse each word."""
    return FVector({tuple(reversed(w)): c for w, c in v.terms.items()})


# ---------------------------------------------------------------------------
# words and the Kashiwara form
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def words_of_weight(alpha: tuple) -> Tuple[Word, ...]:
    """All words with letter multiplicities alpha, in lexicographic order."""
    n = len(alpha)
    out: List[Word] = []

    def rec(prefix, left):
        if not any(left):
            out.append(tuple(prefix))
            return
        for i in range(n):
            if left[i]:
                left[i] -= 1
                prefix.append(i)
                rec(prefix, left)
                prefix.pop()
                left[i] += 1

    rec([], list(alpha))
    return tuple(out)


@lru_cache(maxsize=None)
def _word_index(alpha: tuple) -> Dict[Word, int]:
    return {w: k for k, w in enumerate(words_of_weight(alpha))}


@lru_cache(maxsize=None)
def word_gram(datum: BorcherdsCartanDatum, alpha: tuple) -> QMatrix:
    """Kashiwara form on all words of weight alpha: (f_i P, Q) = (P, e_i' Q)."""
    words = words_of_weight(alpha)
    m = QMatrix.zeros(len(words), len(words))
    if not any(alpha):
        m.data[0][0] = ONE
        return m
    for a, w in enumerate(words):
        i = w[0]
        beta = shift(alpha, i, -1)
        sub = word_gram(datum, beta)
        idx = _word_index(beta)
        ra = idx[w[1:]]
        for b in range(a, len(words)):
            acc = ZERO
            for w2, e in _eprime_word(i, words[b], datum, -1):
                x = sub.data[ra][idx[w2]]
                if x:
                    acc = acc + qpow(e) * x
            m.data[a][b] = acc
            m.data[b][a] = acc
    return m


def kform(p: FVector, q: FVector, datum: BorcherdsCartanDatum) -> ScalarQ:
    """The Kashiwara form; zero on vectors of different weights."""
    if not p or not q:
        return ZERO
    alpha, beta = p.weight(datum.n), q.weight(datum.n)
    if alpha != beta:
        return ZERO
    g = word_gram(datum, alpha)
    idx = _word_index(alpha)
    acc = ZERO
    for w1, c1 in p.terms.items():
        row = g.data[idx[w1]]
        for w2, c2 in q.terms.items():
            x = row[idx[w2]]
            if x:
                acc = acc + c1 * c2 * x
    return acc


class UmWeightSpace:
    """U_q^-_{-alpha} as words modulo the radical of the Kashiwara form."""

    def __init__(self, datum: BorcherdsCartanDatum, alpha: tuple):
        self.datum = datum
        self.alpha = tuple(alpha)
        self.words = words_of_weight(self.alpha)
        self.index = _word_index(self.alpha)
        full = word_gram(datum, self.alpha)
        self.basis_idx = independent_rows(full)
        self.basis_words = [self.words[k] for k in self.basis_idx]
        self.gram = QMatrix([[full.data[a][b] for b in self.basis_idx] for a in self.basis_idx], cols=len(self.basis_idx))
        if self.basis_idx:
            rows = QMatrix([full.data[a] for a in self.basis_idx], cols=len(self.words))
            self.reduction = matmul(inverse(self.gram), rows)
        else:
            self.reduction = QMatrix.zeros(0, len(self.words))
        self.full_gram = full

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

    def to_fvector(self, coords: Sequence[ScalarQ]) -> FVector:
        return FVector({w: c for w, c in zip(self.basis_words, coords)})

    def nullity(self) -> int:
        return len(self.words) - self.dim


@lru_cache(maxsize=None)
def um_basis(alpha: tuple, datum: BorcherdsCartanDatum) -> UmWeightSpace:
    return UmWeightSpace(datum, tuple(alpha))


def um_equal(u: FVector, v: FVector, datum: BorcherdsCartanDatum) -> bool:
    """Equality in U_q^- (modulo the radical)."""
    d = u - v
    if not d:
        return True
    return all(not x for x in um_basis(d.weight(datum.n), datum).reduce(d))


def serre_element(i: int, j: int, datum: BorcherdsCartanDatum) -> FVector:
    """sum_r (-1)^r [1-a_ij choose r]_i f_i^{1-a_ij-r} f_j f_i^r for real i != j."""
    from .qarith import qbinom

    if not datum.is_real(i) or i == j:
        raise ValueError("Serre elements need a real i and j != i")
    m = 1 - datum.A[i][j]
    out = FVector()
    for r in range(m + 1):
        c = qbinom(m, r, i, datum) * (-1) ** r
        out = out + FVector.word((i,) * (m - r) + (j,) + (i,) * r, c)
    return out


def commuting_element(i: int, j: int) -> FVector:
    """f_i f_j - f_j f_i (vanishes in U_q^- when a_ij = 0)."""
    return FVector.word((i, j)) - FVector.word((j, i))


# ---------------------------------------------------------------------------
# projector and i-strings on U_q^-
# ---------------------------------------------------------------------------


def _pi_exponent(i: int, n: int, datum: BorcherdsCartanDatum) -> int:
    return datum.s[i] * datum.string_c(i) * n * (n - 1) // 2


def proj_Pi(i: int, v: FVector, datum: BorcherdsCartanDatum) -> FVector:
    """P_i = sum_n (-1)^n q_i^{c n(n-1)/2} f_i^{(n)} e_i'^{(n)}, c = -a_ii/2."""
    out = FVector()
    n, cur = 0, v
    while cur:
        w = cur
        if n > 0 and datum.is_imaginary(i):
            w = cur.scale(qbrace_factorial(n, i, datum).inverse())
        term = f_divided(i, n, w, datum).scale(qpow(_pi_exponent(i, n, datum)) * (-1) ** n)
        out = out + term
        cur = eprime(i, cur, datum)
        n += 1
    return out


def istring_um(i: int, v: FVector, datum: BorcherdsCartanDatum) -> List[tuple]:
    """[(l, u_l)] with v = sum f_i^{(l)} u_l, e_i' u_l = 0, using the P_i formula."""
    out = []
    l = 0
    cur = v
    while cur:
        ul = proj_Pi(i, eprime_divided(i, l, v, datum), datum).scale(qpow(-_pi_exponent(i, l, datum)))
        if ul and not um_equal(ul, FVector(), datum):
            out.append((l, ul))
        l += 1
        cur = eprime(i, cur, datum)
    total = FVector()
    for l, ul in out:
        total = total + f_divided(i, l, ul, datum)
    if v and not um_equal(total, v, datum):
        raise ReconstructionFailed(f"{i}-string of {v} does not reconstruct")
    return out


def tilde_ops_um(i: int, v: FVector, datum: BorcherdsCartanDatum) -> Tuple[FVector, FVector]:
    """(e~_i v, f~_i v) from the i-string decomposition."""
    ev, fv = FVector(), FVector()
    for l, ul in istring_um(i, v, datum):
        if l >= 1:
            ev = ev + f_divided(i, l - 1, ul, datum)
        fv = fv + f_divided(i, l + 1, ul, datum)
    return ev, fv


# ---------------------------------------------------------------------------
# U_q^- as a graded module
# ---------------------------------------------------------------------------


class UMinus(GradedModule):
    """U_q^- truncated at a depth, with e_i' as the string operator."""

    kind = "um"

    def __init__(self, datum: BorcherdsCartanDatum, depth: int):
        super().__init__(datum, depth, lam=None)
        self._f: Dict[tuple, QMatrix] = {}
        self._e: Dict[tuple, QMatrix] = {}
        self._e2: Dict[tuple, QMatrix] = {}

    def space(self, alpha) -> UmWeightSpace:
        return um_basis(tuple(alpha), self.datum)

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

    def _e_generic(self, i: int, alpha, cache, op) -> QMatrix:
        key = (i, tuple(alpha))
        m = cache.get(key)
        if m is None:
            target = shift(tuple(alpha), i, -1)
            src = self.space(alpha)
            if target is None:
                m = QMatrix.zeros(0, src.dim)
            else:
                dst = self.space(target)
                cols = [dst.reduce(op(i, FVector.word(w), self.datum)) for w in src.basis_words]
                m = QMatrix.from_columns(cols, rows=dst.dim) if cols else QMatrix.zeros(dst.dim, 0)
            cache[key] = m
        return m

    def e_matrix(self, i: int, alpha) -> QMatrix:
        return self._e_generic(i, alpha, self._e, eprime)

    def edprime_matrix(self, i: int, alpha) -> QMatrix:
        return self._e_generic(i, alpha, self._e2, edprime)

    def to_fvector(self, alpha, coords) -> FVector:
        return self.space(alpha).to_fvector(coords)

    def reduce(self, v: FVector) -> list:
        return self.space(v.weight(self.n)).reduce(v)


@lru_cache(maxsize=None)
def _binf_cached(datum: BorcherdsCartanDatum, depth: int) -> CrystalData:
    return bfs_crystal(UMinus(datum, depth))


def binf_data(datum: BorcherdsCartanDatum, depth: int) -> CrystalData:
    """Lattice L(infinity) and crystal B(infinity) up to the given depth."""
    return _binf_cached(datum, depth)


def binf(datum: BorcherdsCartanDatum, depth: int) -> Tuple[CrystalData, CrystalGraph]:
    data = binf_data(datum, depth)
    graph = data.graph(phi_mode="binf", meta={"lambda": "inf"})
    return data, graph


def um_dims(datum: BorcherdsCartanDatum, depth: int) -> Dict[tuple, int]:
    return {a: um_basis(a, datum).dim for a in roots_up_to(datum.n, depth)}
