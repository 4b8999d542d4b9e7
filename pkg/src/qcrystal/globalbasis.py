"""Global bases: bar-invariant lifts of crystal bases.

Elements are written in the spanning set of divided-power monomials: a word
is read as a product of maximal runs f_i^{(r)}.  The solver looks for
bar-symmetric Laurent coefficients c_j(q) = a_j0 + sum_d a_jd (q^d + q^-d)
such that x = sum_j c_j m_j lies in the crystal lattice with residue equal
to the target crystal element.  Those conditions are linear over Q in the
a_jd after expanding each lattice coordinate in powers of q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Dict, List, Optional, Sequence, Tuple

from .cartan import BorcherdsCartanDatum
from .freealg import FVector, words_of_weight
from .graded import CrystalData, divided_factor, is_zero_residue, shift
from .linalg import NotInLattice, QMatrix, matvec, rank, solve_rational
from .qarith import ONE, ZERO, LaurentPoly, ScalarQ, as_scalar


class BarDomain(ValueError):
    """Bar is only applied to vectors with Laurent-polynomial coefficients."""


class DegreeBudgetExceeded(RuntimeError):
    """No solution within the configured Laurent degree budget."""


class NonUniqueSolution(RuntimeError):
    """Two distinct bar-invariant lifts exist (contradicts uniqueness; a bug)."""


def bar_vec(v: FVector) -> FVector:
    """Coefficientwise q -> q^-1 on a vector with Laurent coefficients."""
    for w, c in v.terms.items():
        if not c.is_laurent():
            raise BarDomain(f"coefficient {c} of {list(w)} is not a Laurent polynomial")
    return v.bar()


def runs(word) -> List[Tuple[int, int]]:
    return [(i, len(list(g))) for i, g in groupby(word)]


def monomial_scale(word, datum: BorcherdsCartanDatum) -> ScalarQ:
    """The monomial prod f_i^{(r)} equals this scalar times the plain word."""
    out = ONE
    for i, r in runs(word):
        out = out * divided_factor(i, r, datum)
    return out


def monomial_label(word, datum: BorcherdsCartanDatum) -> str:
    if not word:
        return "1"
    parts = []
    for i, r in runs(word):
        lab = datum.labels[i]
        if r == 1:
            parts.append(f"f{lab}")
        elif datum.is_real(i):
            parts.append(f"f{lab}^({r})")
        else:
            parts.append(f"f{lab}^{r}")
    return " ".join(parts)


def _sym(d: int) -> ScalarQ:
    return ONE if d == 0 else LaurentPoly({d: 1, -d: 1}).to_scalar()


@dataclass
class GlobalBasisElem:
    node_id: str
    alpha: tuple
    coeffs: Dict[tuple, ScalarQ]  # monomial word -> Laurent coefficient
    coords: list  # coordinates in the weight-space basis
    degree: int
    certificates: Dict[str, bool] = field(default_factory=dict)

    def ok(self) -> bool:
        return all(self.certificates.values())

    def monomial_vector(self) -> FVector:
        """The element as a combination of divided-power monomials (keyed by word)."""
        return FVector(self.coeffs)

    def as_fvector(self, datum: BorcherdsCartanDatum) -> FVector:
        """The element as a combination of plain words."""
        return FVector({w: c * monomial_scale(w, datum) for w, c in self.coeffs.items()})

    def export(self, datum: BorcherdsCartanDatum) -> list:
        return [[monomial_label(w, datum), str(c)] for w, c in sorted(self.coeffs.items())]


class GlobalSolver:
    """Solves for G(b) weight by weight on a computed crystal lattice."""

    def __init__(self, data: CrystalData, max_extra_degree: int = 4, budget: Optional[int] = None):
        self.data = data
        self.module = data.module
        self.datum = data.module.datum
        self.max_extra = max_extra_degree
        self.budget = budget
        self._mono: Dict[tuple, tuple] = {}

    def monomials(self, alpha) -> tuple:
        """(words, module coordinates of each monomial, lattice coordinates)."""
        alpha = tuple(alpha)
        hit = self._mono.get(alpha)
        if hit is None:
            space = self.module.space(alpha)
            lat = self.data.lattices[alpha]
            words, coords, lcoords = [], [], []
            for w in words_of_weight(alpha):
                c = monomial_scale(w, self.datum)
                v = [c * x if x else ZERO for x in space.coords_of_word(w)]
                if all(not x for x in v):
                    continue
                words.append(w)
                coords.append(v)
                lcoords.append(lat.coords(v))
            hit = self._mono[alpha] = (words, coords, lcoords)
        return hit

    def _system(self, alpha, target: Sequence[Fraction], D: int):
        words, coords, lcoords = self.monomials(alpha)
        m, d = len(words), len(target)
        nvars = m * (D + 1)
        rows, rhs = [], []
        for k in range(d):
            ells = [lc[k] for lc in lcoords]
            vals = [e.val0() for e in ells if e]
            if not vals:
                rows.append([Fraction(0)] * nvars)
                rhs.append(Fraction(target[k]))
                continue
            emin = min(min(vals) - D, 0)
            lo, hi = emin - D, D
            series = [e.series(lo, hi) if e else None for e in ells]
            for e in range(emin, 1):
                row = [Fraction(0)] * nvars
                for j, s in enumerate(series):
                    if s is None:
                        continue
                    for dd in range(D + 1):
                        if dd == 0:
                            val = s[e - lo]
                        else:
                            val = s[e - dd - lo] + s[e + dd - lo]
                        row[j * (D + 1) + dd] = val
                rows.append(row)
                rhs.append(Fraction(target[k]) if e == 0 else Fraction(0))
        return rows, rhs, nvars

    def _assemble(self, alpha, sol, D: int):
        words, coords, _ = self.monomials(alpha)
        coeffs: Dict[tuple, ScalarQ] = {}
        for j, w in enumerate(words):
            c = ZERO
            for dd in range(D + 1):
                a = sol[j * (D + 1) + dd]
                if a:
                    c = c + _sym(dd) * a
            if c:
                coeffs[w] = c
        vec = [ZERO] * self.module.dim(alpha)
        for j, w in enumerate(words):
            c = coeffs.get(w)
            if c:
                vec = [x + c * y if y else x for x, y in zip(vec, coords[j])]
        return coeffs, vec

    def solve(self, alpha, k: int, D: Optional[int] = None) -> GlobalBasisElem:
        alpha = tuple(alpha)
        target = self.data.B[alpha][k]
        start = sum(alpha) if D is None else D
        stop = self.budget if self.budget is not None else start + self.max_extra
        for deg in range(start, max(start, stop) + 1):
            rows, rhs, nvars = self._system(alpha, target, deg)
            sol, null = solve_rational(rows, rhs, nvars)
            if sol is None:
                continue
            coeffs, vec = self._assemble(alpha, sol, deg)
            for nv in null:
                _, hv = self._assemble(alpha, nv, deg)
                if any(hv):
                    raise NonUniqueSolution(f"homogeneous solution at {alpha} for node {self.data.node_id(alpha, k)}")
            elem = GlobalBasisElem(self.data.node_id(alpha, k), alpha, coeffs, vec, deg)
            elem.certificates = self.certify(elem, target)
            return elem
        raise DegreeBudgetExceeded(f"no bar-invariant lift of {self.data.node_id(alpha, k)} with degree <= {stop}")

    def certify(self, elem: GlobalBasisElem, target) -> Dict[str, bool]:
        laurent = all(c.is_laurent() for c in elem.coeffs.values())
        fixed = laurent and all(c.bar() == c for c in elem.coeffs.values())
        try:
            res = self.data.residue(elem.alpha, elem.coords)
            residue_ok = tuple(res) == tuple(target)
        except NotInLattice:
            residue_ok = False
        return {"laurent": laurent, "bar_fixed": fixed, "residue": residue_ok}

    def weight(self, alpha) -> List[GlobalBasisElem]:
        alpha = tuple(alpha)
        return [self.solve(alpha, k) for k in range(len(self.data.B[alpha]))]

    def all(self) -> Dict[tuple, List[GlobalBasisElem]]:
        return {a: self.weight(a) for a in self.module.alphas}


def global_basis(data: CrystalData, budget: Optional[int] = None) -> Dict[tuple, List[GlobalBasisElem]]:
    return GlobalSolver(data, budget=budget).all()


def solve_global(data: CrystalData, alpha, k: int, D: Optional[int] = None, budget: Optional[int] = None) -> GlobalBasisElem:
    return GlobalSolver(data, budget=budget).solve(alpha, k, D)


@dataclass
class CheckReport:
    name: str
    passed: bool
    instances: int
    failures: List[str] = field(default_factory=list)


def balanced_check(data: CrystalData, elems: Sequence[GlobalBasisElem], alpha) -> CheckReport:
    """Basis over Q(q), residues exactly B, bar-fixed, cardinality = dim."""
    alpha = tuple(alpha)
    d = data.module.dim(alpha)
    fails = []
    if len(elems) != d:
        fails.append(f"{len(elems)} elements for dimension {d}")
    if d and rank(QMatrix.from_columns([e.coords for e in elems], rows=d)) != d:
        fails.append("elements are linearly dependent")
    res = set()
    for e in elems:
        try:
            res.add(data.residue(alpha, e.coords))
        except NotInLattice:
            fails.append(f"{e.node_id} is outside the lattice")
        if not e.certificates.get("bar_fixed"):
            fails.append(f"{e.node_id} is not bar-fixed")
    if res != set(data.B[alpha]):
        fails.append("residues differ from the crystal")
    return CheckReport(f"balanced {alpha}", not fails, max(1, len(elems)), fails)


def laurent_member(vectors: Sequence[Sequence[ScalarQ]], target: Sequence[ScalarQ], D: int) -> Optional[list]:
    """Laurent coefficients a_j (degree window [-D, D]) with sum a_j v_j = target, or None."""
    m = len(vectors)
    if not m:
        return None if any(target) else []
    span = 2 * D + 1
    nvars = m * span
    rows, rhs = [], []
    for k in range(len(target)):
        entries = [v[k] for v in vectors] + [target[k]]
        den = ONE
        seen = set()
        for x in entries:
            if x and not x.is_laurent():
                dl = x.denominator.to_scalar()
                if dl not in seen:
                    seen.add(dl)
                    den = den * dl
        polys = [(x * den).to_laurent() if x else LaurentPoly() for x in entries]
        lo = min((p.min_degree() for p in polys if p), default=0) - D
        hi = max((p.max_degree() for p in polys if p), default=0) + D
        for e in range(lo, hi + 1):
            row = [Fraction(0)] * nvars
            for j in range(m):
                p = polys[j]
                if not p:
                    continue
                for t in range(span):
                    row[j * span + t] = p.coefficient(e - (t - D))
            rows.append(row)
            rhs.append(polys[m].coefficient(e))
    sol, _ = solve_rational(rows, rhs, nvars)
    if sol is None:
        return None
    out = []
    for j in range(m):
        out.append(LaurentPoly({t - D: sol[j * span + t] for t in range(span) if sol[j * span + t]}).to_scalar())
    return out


def integral_string_check(data: CrystalData, graph, elems: Sequence[GlobalBasisElem], i: int, n: int, alpha, D: Optional[int] = None) -> CheckReport:
    """G(b) lies in sum_{l >= n} f_i^{(l)} (integral form) whenever eps_i(b) >= n."""
    alpha = tuple(alpha)
    mod = data.module
    datum = mod.datum
    fails, count = [], 0
    solver = GlobalSolver(data)
    words, coords, _ = solver.monomials(alpha)
    if n == 0:
        allowed = list(coords)
    else:
        allowed = [c for w, c in zip(words, coords) if runs(w) and runs(w)[0][0] == i and runs(w)[0][1] >= n]
    window = D if D is not None else sum(alpha) + 2
    for e in elems:
        node = graph.by_id[e.node_id]
        if node.eps[i] < n:
            continue
        count += 1
        for l, _u in mod.istring(i, alpha, e.coords):
            if l < n:
                fails.append(f"{e.node_id}: {i}-string component {l} < {n} is nonzero")
        if laurent_member(allowed, e.coords, window) is None:
            fails.append(f"{e.node_id}: not in the Laurent span of monomials starting with f_{i}^({n}) or higher")
    return CheckReport(f"integral string i={i} n={n} {alpha}", not fails, count, fails)


def export_json(elems_by_alpha: Dict[tuple, List[GlobalBasisElem]], datum: BorcherdsCartanDatum, meta: Optional[dict] = None) -> str:
    out = {"schema": "global/1", "elements": {}, "meta": dict(meta or {})}
    for alpha in sorted(elems_by_alpha, key=lambda a: (sum(a), a)):
        for e in elems_by_alpha[alpha]:
            out["elements"][e.node_id] = e.export(datum)
    return json.dumps(out, separators=(",", ":")) + "\n"
