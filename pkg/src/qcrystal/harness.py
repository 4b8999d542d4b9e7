"""Executable checks of the inductive statements A..O and related identities.

Each checker evaluates its statement on computed data for every alpha with
|alpha| <= r and records how many nontrivial instances it examined.  A
statement that was never exercised is reported as vacuous, which fails the
suite.  Any failure means the implementation is wrong: the statements are
theorems, so the report carries a witness for debugging.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional

from .cartan import BorcherdsCartanDatum, load_datum, roots_up_to
from .crystal import tensor_crystal_data
from .freealg import FVector, binf_data, star, um_basis
from .graded import CrystalData, is_zero_residue, shift
from .linalg import LatticeBasis, NotInLattice, QMatrix, inverse, matmul, matvec, rational_rank
from .qarith import ONE, ZERO, LaurentPoly, parse_scalar, qpow
from .vrep import crystal_data

try:  # Python >= 3.11
    import tomllib
except ImportError:  # pragma: no cover
    import tomli as tomllib

STATEMENTS = tuple("ABCDEFGHIJKLMNO")
LARGE_LAMBDA = ("L", "M", "N", "O")
INVARIANTS = ("psi_phi", "s_map", "pq_lemma", "key_lemma", "orthogonality", "adjoint", "string_count", "l0", "membership")


class WellDefinednessViolation(RuntimeError):
    """A relation of V(lambda + mu) is not killed by the coproduct map."""


def _vec(v) -> List[str]:
    return [str(x) for x in v]


@dataclass
class StatementReport:
    statement: str
    datum: str
    lam: list
    mu: list
    r: int
    instances: int = 0
    failures: List[dict] = field(default_factory=list)
    note: str = ""
    applicable: bool = True

    @property
    def vacuous(self) -> bool:
        return self.instances == 0 and self.applicable

    @property
    def passed(self) -> bool:
        return not self.failures and not self.vacuous

    def fail(self, **witness) -> None:
        self.failures.append({k: (v if isinstance(v, (int, str, list, dict)) else str(v)) for k, v in witness.items()})

    def as_dict(self) -> dict:
        return {
            "statement": self.statement,
            "datum": self.datum,
            "lambda": self.lam,
            "mu": self.mu,
            "r": self.r,
            "instances": self.instances,
            "vacuous": self.vacuous,
            "applicable": self.applicable,
            "passed": self.passed,
            "failures": self.failures[:20],
            "note": self.note,
        }


def _min_val(coords) -> float:
    return min((x.val0() for x in coords if x), default=float("inf"))


def corrupt_lattice(data: CrystalData, alpha, index: int = 0, factor: str = "q^-1") -> CrystalData:
    """A copy of ``data`` with one lattice vector rescaled (negative control)."""
    alpha = tuple(alpha)
    c = parse_scalar(factor)
    lattices = dict(data.lattices)
    old = lattices[alpha]
    vecs = [list(v) for v in old.vectors]
    vecs[index] = [c * x if x else ZERO for x in vecs[index]]
    lattices[alpha] = LatticeBasis(vecs, old.dim)
    return CrystalData(data.module, lattices, data.B, data.ids)


class CaseContext:
    """Shared computations for one (datum, lambda, mu, depth) case."""

    def __init__(self, datum: BorcherdsCartanDatum, lam, mu, depth: int, corrupt: Optional[dict] = None):
        self.datum = datum
        self.lam = tuple(lam)
        self.mu = tuple(mu)
        self.depth = depth
        self.V = crystal_data(datum, self.lam, depth)
        if corrupt:
            self.V = corrupt_lattice(self.V, corrupt["alpha"], corrupt.get("index", 0), corrupt.get("factor", "q^-1"))
        self.alphas = roots_up_to(datum.n, depth)
        self._phi_words: Dict[tuple, list] = {}
        self._phi: Dict[tuple, QMatrix] = {}
        self._psi: Dict[tuple, QMatrix] = {}
        self._pi: Dict[tuple, QMatrix] = {}

    @cached_property
    def Vsum(self) -> CrystalData:
        return crystal_data(self.datum, tuple(a + b for a, b in zip(self.lam, self.mu)), self.depth)

    @cached_property
    def T(self) -> CrystalData:
        return tensor_crystal_data(self.datum, self.lam, self.mu, self.depth)

    @cached_property
    def Binf(self) -> CrystalData:
        return binf_data(self.datum, self.depth)

    def report(self, sid: str) -> StatementReport:
        return StatementReport(sid, self.datum.name, list(self.lam), list(self.mu), self.depth)

    # -- maps ----------------------------------------------------------------

    def _coproduct_word(self, w: tuple) -> list:
        hit = self._phi_words.get(w)
        if hit is None:
            t = self.T.module
            if not w:
                hit = [ONE]
            else:
                rest = self._coproduct_word(w[1:])
                beta = [0] * self.datum.n
                for j in w[1:]:
                    beta[j] += 1
                hit = matvec(t.f_matrix(w[0], tuple(beta)), rest)
            self._phi_words[w] = hit
        return hit

    def phi(self, alpha) -> QMatrix:
        """Phi on V(lambda+mu) at grade alpha, as a matrix into the tensor grade."""
        alpha = tuple(alpha)
        hit = self._phi.get(alpha)
        if hit is None:
            space = self.Vsum.module.space(alpha)
            cols = [self._coproduct_word(w) for w in space.basis_words]
            dt = self.T.module.dim(alpha)
            hit = QMatrix.from_columns(cols, rows=dt) if cols else QMatrix.zeros(dt, 0)
            for w in space.words:
                red = space.coords_of_word(w)
                expect = matvec(hit, red) if cols else [ZERO] * dt
                if expect != self._coproduct_word(w):
                    raise WellDefinednessViolation(f"word {w} at {alpha}")
            self._phi[alpha] = hit
        return hit

    def psi(self, alpha) -> QMatrix:
        """Adjoint of Phi for the product form: G_sum^{-1} Phi^T G_tensor."""
        alpha = tuple(alpha)
        hit = self._psi.get(alpha)
        if hit is None:
            p = self.phi(alpha)
            gs = self.Vsum.module.gram(alpha)
            gt = self.T.module.gram(alpha)
            if gs.rows == 0:
                hit = QMatrix.zeros(0, gt.rows)
            else:
                hit = matmul(matmul(inverse(gs), p.transpose()), gt)
            self._psi[alpha] = hit
        return hit

    def s_matrix(self, alpha) -> QMatrix:
        """S(u x v_mu) = u, S(V(lambda) x f_i V(mu)) = 0."""
        alpha = tuple(alpha)
        t = self.T.module
        d1 = self.V.module.dim(alpha)
        out = QMatrix.zeros(d1, t.dim(alpha))
        hit = t.block_offset(alpha, alpha)
        if hit is not None:
            pos = hit[0]
            for s in range(d1):
                out.data[s][pos + s] = ONE
        return out

    def pi(self, alpha) -> QMatrix:
        """pi_lambda from U_q^- coordinates to V(lambda) coordinates."""
        alpha = tuple(alpha)
        hit = self._pi.get(alpha)
        if hit is None:
            us = um_basis(alpha, self.datum)
            vs = self.V.module.space(alpha)
            cols = [vs.coords_of_word(w) for w in us.basis_words]
            hit = QMatrix.from_columns(cols, rows=vs.dim) if cols else QMatrix.zeros(vs.dim, 0)
            self._pi[alpha] = hit
        return hit


# ---------------------------------------------------------------------------
# generic crystal statements (A-D on L(lambda), H-K on L(infinity))
# ---------------------------------------------------------------------------


def _check_lattice_stable(rep: StatementReport, data: CrystalData) -> None:
    m = data.module
    for alpha in m.alphas:
        for i in range(m.n):
            beta = shift(alpha, i, -1)
            if beta is None or m.dim(alpha) == 0:
                continue
            et = m.e_tilde(i, alpha)
            for k, v in enumerate(data.lattices[alpha].vectors):
                rep.instances += 1
                w = matvec(et, v)
                coords = data.lattices[beta].coords(w) if m.dim(beta) else []
                if _min_val(coords) < 0:
                    rep.fail(alpha=list(alpha), i=i, lattice_vector=k, image_coords=_vec(coords), expected="val0 >= 0")


def _check_e_closed(rep: StatementReport, data: CrystalData) -> None:
    m = data.module
    for alpha in m.alphas:
        for k in range(len(data.B[alpha])):
            for i in range(m.n):
                if alpha[i] == 0:
                    continue
                rep.instances += 1
                try:
                    target, r = data.apply_tilde("e", i, alpha, k)
                except NotInLattice as exc:
                    rep.fail(alpha=list(alpha), i=i, node=data.node_id(alpha, k), error=str(exc))
                    continue
                if r and not is_zero_residue(r) and data.locate(target, r) is None:
                    rep.fail(alpha=list(alpha), i=i, node=data.node_id(alpha, k), residue=_vec(r), expected="element of B or 0")


def _residue_or_none(data, op, i, alpha, k):
    try:
        target, r = data.apply_tilde(op, i, alpha, k)
    except NotInLattice:
        return "outside"
    if target is None or not r or is_zero_residue(r):
        return None
    j = data.locate(target, r)
    return (target, j) if j is not None else "outside"


def _check_pairing(rep: StatementReport, data: CrystalData, one_sided: bool) -> None:
    m = data.module
    for alpha in m.alphas:
        for i in range(m.n):
            beta = shift(alpha, i, -1)
            if beta is None:
                continue
            for kp in range(len(data.B[alpha])):
                e_img = _residue_or_none(data, "e", i, alpha, kp)
                if one_sided:
                    if e_img is None:
                        continue
                    rep.instances += 1
                    if e_img == "outside":
                        rep.fail(alpha=list(alpha), i=i, node=data.node_id(alpha, kp), error="e~ leaves B")
                        continue
                    back = _residue_or_none(data, "f", i, e_img[0], e_img[1])
                    if back != (alpha, kp):
                        rep.fail(alpha=list(alpha), i=i, node=data.node_id(alpha, kp), expected="f~ e~ b = b", actual=str(back))
                    continue
                for k in range(len(data.B[beta])):
                    rep.instances += 1
                    f_img = _residue_or_none(data, "f", i, beta, k)
                    lhs = f_img == (alpha, kp)
                    rhs = e_img == (beta, k)
                    if lhs != rhs:
                        rep.fail(alpha=list(alpha), i=i, b=data.node_id(beta, k), b_prime=data.node_id(alpha, kp), f_b_is_bprime=lhs, e_bprime_is_b=rhs)


def _check_basis(rep: StatementReport, data: CrystalData) -> None:
    m = data.module
    for alpha in m.alphas:
        d = m.dim(alpha)
        if d == 0:
            continue
        rep.instances += 1
        res = data.B[alpha]
        if len(res) != d or rational_rank(res) != d:
            rep.fail(alpha=list(alpha), dim=d, crystal_size=len(res), rank=rational_rank(res) if res else 0)


# ---------------------------------------------------------------------------
# the statements
# ---------------------------------------------------------------------------


def check_A(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("A")
    _check_lattice_stable(rep, ctx.V)
    return rep


def check_B(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("B")
    _check_e_closed(rep, ctx.V)
    return rep


def check_C(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("C")
    _check_pairing(rep, ctx.V, one_sided=False)
    return rep


def check_D(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("D")
    _check_basis(rep, ctx.V)
    return rep


def check_E(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("E")
    rep.note = "checked on an A_0-basis of L(lambda+mu); containment follows by A_0-linearity"
    for alpha in ctx.alphas:
        if ctx.Vsum.module.dim(alpha) == 0:
            continue
        p = ctx.phi(alpha)
        for k, v in enumerate(ctx.Vsum.lattices[alpha].vectors):
            rep.instances += 1
            coords = ctx.T.lattices[alpha].coords(matvec(p, v))
            if _min_val(coords) < 0:
                rep.fail(alpha=list(alpha), lattice_vector=k, image_coords=_vec(coords))
    return rep


def check_F(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("F")
    rep.note = "checked on an A_0-basis of L(lambda) x L(mu); containment follows by A_0-linearity"
    for alpha in ctx.alphas:
        if ctx.T.module.dim(alpha) == 0:
            continue
        ps = ctx.psi(alpha)
        for k, v in enumerate(ctx.T.lattices[alpha].vectors):
            rep.instances += 1
            w = matvec(ps, v)
            coords = ctx.Vsum.lattices[alpha].coords(w) if w else []
            if _min_val(coords) < 0:
                rep.fail(alpha=list(alpha), lattice_vector=k, image_coords=_vec(coords))
    return rep


def check_G(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("G")
    for alpha in ctx.alphas:
        if ctx.T.module.dim(alpha) == 0:
            continue
        ps = ctx.psi(alpha)
        for k in range(len(ctx.T.B[alpha])):
            rep.instances += 1
            w = matvec(ps, ctx.T.lift(alpha, k))
            if not w:
                continue
            try:
                r = ctx.Vsum.residue(alpha, w)
            except NotInLattice as exc:
                rep.fail(alpha=list(alpha), node=ctx.T.node_id(alpha, k), error=str(exc))
                continue
            if not is_zero_residue(r) and ctx.Vsum.locate(alpha, r) is None:
                rep.fail(alpha=list(alpha), node=ctx.T.node_id(alpha, k), residue=_vec(r), expected="element of B(lambda+mu) or 0")
    return rep


def check_H(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("H")
    _check_lattice_stable(rep, ctx.Binf)
    return rep


def check_I(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("I")
    _check_e_closed(rep, ctx.Binf)
    return rep


def check_J(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("J")
    _check_pairing(rep, ctx.Binf, one_sided=True)
    return rep


def check_K(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("K")
    _check_basis(rep, ctx.Binf)
    return rep


def _pi_bar(ctx: CaseContext, alpha, k):
    """Residue of pi_lambda(lift b) in L(lambda), or None if zero."""
    v = matvec(ctx.pi(alpha), ctx.Binf.lift(alpha, k))
    if ctx.V.module.dim(alpha) == 0:
        return None
    r = ctx.V.residue(alpha, v)
    return None if is_zero_residue(r) else r


def check_L(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("L")
    for alpha in ctx.alphas:
        d = ctx.V.module.dim(alpha)
        if d == 0:
            continue
        rep.instances += 1
        p = ctx.pi(alpha)
        images = [matvec(p, v) for v in ctx.Binf.lattices[alpha].vectors]
        coords = [ctx.V.lattices[alpha].coords(w) for w in images]
        bad = [k for k, c in enumerate(coords) if _min_val(c) < 0]
        if bad:
            rep.fail(alpha=list(alpha), image_outside_lattice=bad, coords=_vec(coords[bad[0]]))
            continue
        res = [[x.eval0() if x else Fraction(0) for x in c] for c in coords]
        if rational_rank(res) != d:
            rep.fail(alpha=list(alpha), expected_rank=d, residue_rank=rational_rank(res))
    return rep


def check_M(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("M")
    um = ctx.Binf.module
    vm = ctx.V.module
    for alpha in ctx.alphas:
        for i in range(ctx.datum.n):
            beta = shift(alpha, i, -1)
            if beta is None or um.dim(beta) == 0 or vm.dim(alpha) == 0:
                continue
            for k, P in enumerate(ctx.Binf.lattices[beta].vectors):
                rep.instances += 1
                lhs = matvec(vm.f_tilde(i, beta), matvec(ctx.pi(beta), P))
                rhs = matvec(ctx.pi(alpha), matvec(um.f_tilde(i, beta), P))
                diff = [a - b for a, b in zip(lhs, rhs)]
                coords = ctx.V.lattices[alpha].coords(diff)
                if _min_val(coords) < 1:
                    rep.fail(alpha=list(alpha), i=i, lattice_vector=k, difference_coords=_vec(coords), expected="in qL(lambda)")
    return rep


def check_N(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("N")
    for alpha in ctx.alphas:
        rep.instances += 1
        images = []
        for k in range(len(ctx.Binf.B[alpha])):
            try:
                r = _pi_bar(ctx, alpha, k)
            except NotInLattice as exc:
                rep.fail(alpha=list(alpha), node=ctx.Binf.node_id(alpha, k), error=str(exc))
                continue
            if r is not None:
                images.append(r)
        target = set(ctx.V.B[alpha])
        if len(images) != len(set(images)) or set(images) != target:
            rep.fail(alpha=list(alpha), surviving=len(images), distinct=len(set(images)), crystal_size=len(target))
    return rep


def check_O(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("O")
    for alpha in ctx.alphas:
        for k in range(len(ctx.Binf.B[alpha])):
            try:
                pb = _pi_bar(ctx, alpha, k)
            except NotInLattice:
                continue
            if pb is None:
                continue
            kv = ctx.V.locate(alpha, pb)
            for i in range(ctx.datum.n):
                beta = shift(alpha, i, -1)
                if beta is None:
                    continue
                rep.instances += 1
                left = _residue_or_none(ctx.V, "e", i, alpha, kv) if kv is not None else "outside"
                eb = _residue_or_none(ctx.Binf, "e", i, alpha, k)
                if eb is None:
                    right = None
                elif eb == "outside":
                    right = "outside"
                else:
                    r = _pi_bar(ctx, eb[0], eb[1])
                    right = None if r is None else (eb[0], ctx.V.locate(eb[0], r))
                if left != right:
                    rep.fail(alpha=list(alpha), i=i, node=ctx.Binf.node_id(alpha, k), e_of_pi=str(left), pi_of_e=str(right))
    return rep


CHECKS = {s: globals()[f"check_{s}"] for s in STATEMENTS}


def check_statement(sid: str, datum: BorcherdsCartanDatum, lam, mu, r: int, corrupt: Optional[dict] = None) -> StatementReport:
    ctx = CaseContext(datum, lam, mu, r, corrupt=corrupt)
    return CHECKS[sid](ctx)


# ---------------------------------------------------------------------------
# auxiliary identities
# ---------------------------------------------------------------------------


def check_psi_phi(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("psi_phi")
    for alpha in ctx.alphas:
        d = ctx.Vsum.module.dim(alpha)
        if d == 0:
            continue
        rep.instances += 1
        m = matmul(ctx.psi(alpha), ctx.phi(alpha))
        if m != QMatrix.identity(d):
            rep.fail(alpha=list(alpha), expected="identity", actual=str(m))
    return rep


def check_s_map(ctx: CaseContext) -> StatementReport:
    """S(f~_i w) = f~_i S(w) mod qL(lambda) on an A_0-basis of L(lambda) x L(mu)."""
    rep = ctx.report("s_map")
    t, v = ctx.T.module, ctx.V.module
    for alpha in ctx.alphas:
        if sum(alpha) >= ctx.depth:
            continue
        for i in range(ctx.datum.n):
            gamma = shift(alpha, i, 1)
            if v.dim(gamma) == 0:
                continue
            for k, w in enumerate(ctx.T.lattices[alpha].vectors):
                rep.instances += 1
                lhs = matvec(ctx.s_matrix(gamma), matvec(t.f_tilde(i, alpha), w))
                rhs = matvec(v.f_tilde(i, alpha), matvec(ctx.s_matrix(alpha), w)) if v.dim(alpha) else [ZERO] * v.dim(gamma)
                coords = ctx.V.lattices[gamma].coords([a - b for a, b in zip(lhs, rhs)])
                if _min_val(coords) < 1:
                    rep.fail(alpha=list(alpha), i=i, lattice_vector=k, difference_coords=_vec(coords))
    return rep


def check_pq_lemma(datum: BorcherdsCartanDatum, depth: int, bound: int, order: int = 2) -> StatementReport:
    """(P,Q) = prod (1 - q_{i_k}^2) (P v, Q v) mod q^order A_0 for lambda(h_i) = bound.

    With (f_i, f_i) = 1 the factor (1 - q_i^2) multiplies the module side.
    """
    lam = (bound,) * datum.n
    rep = StatementReport("pq_lemma", datum.name, list(lam), [], depth, note=f"lambda(h_i) = {bound}, order {order}")
    from .vrep import v_basis

    for alpha in roots_up_to(datum.n, depth):
        if not any(alpha):
            continue
        us = um_basis(alpha, datum)
        vs = v_basis(lam, alpha, datum)
        scale = ONE
        for i, k in enumerate(alpha):
            for _ in range(k):
                scale = scale * (ONE - qpow(2 * datum.s[i]))
        pimat = QMatrix.from_columns([vs.coords_of_word(w) for w in us.basis_words], rows=vs.dim)
        gv = matmul(matmul(pimat.transpose(), vs.gram), pimat)
        for a in range(us.dim):
            for b in range(us.dim):
                rep.instances += 1
                diff = us.gram.data[a][b] - scale * gv.data[a][b]
                if diff and diff.val0() < order:
                    rep.fail(alpha=list(alpha), P=list(us.basis_words[a]), Q=list(us.basis_words[b]), difference=str(diff))
    return rep


def check_key_lemma(datum: BorcherdsCartanDatum, mu, depth: int) -> StatementReport:
    """f~_{i_1} ... f~_{i_r} (v_lambda x v_mu) is a pure tensor mod q for lambda = Lambda_{i_t}."""
    rep = StatementReport("key_lemma", datum.name, [], list(mu), depth)
    n = datum.n
    if n == 1:
        # no sequence with i_t != i_{t+1} exists
        rep.applicable = False
        rep.note = "rank one: hypothesis never satisfied"
        return rep
    for it in range(n):
        lam = tuple(1 if k == it else 0 for k in range(n))
        data = tensor_crystal_data(datum, lam, tuple(mu), depth)
        t = data.module
        for r in range(2, depth + 1):
            for seq in product(range(n), repeat=r):
                tpos = [p for p in range(r - 1) if seq[p] == it and seq[p] != seq[p + 1] and all(x == seq[-1] for x in seq[p + 1 :])]
                if not tpos:
                    continue
                vec, alpha = [ONE], (0,) * n
                for i in reversed(seq):
                    vec = matvec(t.f_tilde(i, alpha), vec)
                    alpha = shift(alpha, i, 1)
                rep.instances += 1
                try:
                    res = data.residue(alpha, vec)
                except NotInLattice as exc:
                    rep.fail(sequence=list(seq), error=str(exc))
                    continue
                if is_zero_residue(res):
                    continue
                k = data.locate(alpha, res)
                if k is None:
                    rep.fail(sequence=list(seq), residue=_vec(res), expected="pure tensor b x b'")
                    continue
                left, right = data.node_id(alpha, k).split("|")
                if left.startswith(".".join(["0"] * n) + "#") or right.startswith(".".join(["0"] * n) + "#"):
                    rep.fail(sequence=list(seq), node=data.node_id(alpha, k), expected="both factors below the highest weight")
    return rep


def crystal_gram(data: CrystalData, alpha):
    """eval0 of the form on lifts of B_alpha (raises if not in A_0)."""
    m = data.module
    lifts = [data.lift(alpha, k) for k in range(len(data.B[alpha]))]
    out = []
    for u in lifts:
        row = []
        for v in lifts:
            x = m.bilinear(alpha, u, v)
            row.append(x.eval0() if x else Fraction(0))
        out.append(row)
    return out


def check_orthogonality(ctx: CaseContext) -> StatementReport:
    rep = ctx.report("orthogonality")
    unit = ctx.datum.all_real_nonzero_diagonal()
    for data in (ctx.V, ctx.Binf):
        for alpha in data.module.alphas:
            if not data.B[alpha]:
                continue
            rep.instances += 1
            g = crystal_gram(data, alpha)
            for a, row in enumerate(g):
                for b, x in enumerate(row):
                    if a != b and x != 0:
                        rep.fail(alpha=list(alpha), entry=[a, b], value=str(x), expected="0")
                    if a == b and (x <= 0 or x.denominator != 1 or (unit and x != 1)):
                        rep.fail(alpha=list(alpha), entry=[a, a], value=str(x), expected="1" if unit else "positive integer")
    return rep


def check_adjoint(ctx: CaseContext) -> StatementReport:
    """(f~_i u, v) = (u, Q_i e~_i v) mod q A_0 on lattice bases."""
    rep = ctx.report("adjoint")
    m = ctx.V.module
    for alpha in m.alphas:
        for i in range(m.n):
            beta = shift(alpha, i, -1)
            if beta is None or m.dim(alpha) == 0 or m.dim(beta) == 0:
                continue
            for u in ctx.V.lattices[beta].vectors:
                for v in ctx.V.lattices[alpha].vectors:
                    rep.instances += 1
                    lhs = m.cform(alpha, matvec(m.f_tilde(i, beta), u), v)
                    rhs = m.cform(beta, u, m.Qi_op(i, beta, matvec(m.e_tilde(i, alpha), v)))
                    diff = lhs - rhs
                    if diff and diff.val0() < 1:
                        rep.fail(alpha=list(alpha), i=i, difference=str(diff))
    return rep


def check_string_count(ctx: CaseContext, nmax: int = 3) -> StatementReport:
    """dim (f_i^n V)_{lambda-alpha} = #{b : eps_i(b) >= n}."""
    from .vrep import fn_dimension

    rep = ctx.report("string_count")
    graph = ctx.V.graph()
    m = ctx.V.module
    for alpha in m.alphas:
        nodes = graph.nodes_at(alpha)
        for i in range(m.n):
            for n in range(1, nmax + 1):
                rep.instances += 1
                lhs = fn_dimension(m, i, alpha, n)
                rhs = sum(1 for b in nodes if b.eps[i] >= n)
                if lhs != rhs:
                    rep.fail(alpha=list(alpha), i=i, n=n, dimension=lhs, count=rhs)
    return rep


def check_l0(ctx: CaseContext) -> StatementReport:
    """Each b has exactly one string component with nonzero residue, and it is a crystal element."""
    rep = ctx.report("l0")
    data = ctx.V
    m = data.module
    for alpha in m.alphas:
        for k in range(len(data.B[alpha])):
            u = data.lift(alpha, k)
            for i in range(m.n):
                rep.instances += 1
                live = []
                for n, un in m.istring(i, alpha, u):
                    beta = shift(alpha, i, -n)
                    r = data.residue(beta, un)
                    if not is_zero_residue(r):
                        live.append((n, data.locate(beta, r)))
                if len(live) != 1 or live[0][1] is None:
                    rep.fail(alpha=list(alpha), i=i, node=data.node_id(alpha, k), live_components=str(live))
    return rep


def _form_member(m, alpha, v) -> bool:
    x = m.bilinear(alpha, v, v)
    return not x or x.val0() >= 0


def check_membership(ctx: CaseContext, count: int = 40, seed: int = 0) -> StatementReport:
    """On random lattice samples u: u in L <=> (u, u) in A_0, also for u/q; on L(inf), u* in L(inf)."""
    rep = ctx.report("membership")
    for which, data in (("V", ctx.V), ("Binf", ctx.Binf)):
        m = data.module
        if not any(sum(a) > 0 and m.dim(a) for a in m.alphas):
            continue
        for alpha, u in sample_lattice_elements(data, count, ctx.depth, seed=seed):
            lat = data.lattices[alpha]
            cands = [u, [x * qpow(-1) if x else x for x in u]]
            if which == "Binf":
                space = m.space(alpha)
                fv = FVector({w: c for w, c in zip(space.basis_words, u) if c})
                us = space.reduce(star(fv))
                if not lat.contains(us):
                    rep.fail(where=which, alpha=list(alpha), u=_vec(u), expected="u* in the lattice")
                cands.append(us)
            for v in cands:
                rep.instances += 1
                if _form_member(m, alpha, v) != lat.contains(v):
                    rep.fail(where=which, alpha=list(alpha), vector=_vec(v), in_lattice=lat.contains(v))
    return rep


def run_invariant(name: str, ctx: CaseContext, bound: int, seed: int = 0) -> StatementReport:
    if name == "psi_phi":
        return check_psi_phi(ctx)
    if name == "s_map":
        return check_s_map(ctx)
    if name == "pq_lemma":
        # the congruence to order 2 needs longer strings than injectivity does
        return check_pq_lemma(ctx.datum, ctx.depth, max(bound, 2 * ctx.depth + 2))
    if name == "key_lemma":
        return check_key_lemma(ctx.datum, ctx.mu, ctx.depth)
    if name == "orthogonality":
        return check_orthogonality(ctx)
    if name == "adjoint":
        return check_adjoint(ctx)
    if name == "string_count":
        return check_string_count(ctx)
    if name == "l0":
        return check_l0(ctx)
    if name == "membership":
        return check_membership(ctx, seed=seed)
    raise ValueError(f"unknown invariant {name!r}")


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


@dataclass
class SuiteReport:
    reports: List[StatementReport] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.reports) and not self.errors and all(r.passed for r in self.reports)

    def failures(self) -> List[StatementReport]:
        return [r for r in self.reports if not r.passed]

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "meta": self.meta,
            "errors": self.errors,
            "reports": [r.as_dict() for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1) + "\n"

    def to_text(self) -> str:
        lines = []
        if not self.reports:
            lines.append("VACUOUS no statements were checked")
        for r in self.reports:
            status = "PASS" if r.passed else ("VACUOUS" if r.vacuous and not r.failures else "FAIL")
            if r.passed and not r.applicable:
                status = "N/A"
            lines.append(f"{status:7s} {r.statement:14s} {r.datum:10s} lambda={r.lam} mu={r.mu} r={r.r} instances={r.instances} failures={len(r.failures)}")
            for f in r.failures[:3]:
                lines.append(f"        witness: {json.dumps(f)}")
        for e in self.errors:
            lines.append(f"ERROR   {e}")
        lines.append("suite: " + ("PASS" if self.passed else "FAIL (a failure here indicates an implementation bug)"))
        return "\n".join(lines) + "\n"


def load_config(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        cfg = tomllib.loads(text)
    else:
        cfg = json.loads(text)
    cfg.setdefault("_base", str(path.parent))
    return cfg


def _resolve_datum(source: str, base: Optional[str]) -> BorcherdsCartanDatum:
    if base and not Path(source).is_absolute() and (Path(base) / source).exists():
        source = str(Path(base) / source)
    return load_datum(source)


def run_suite(config: dict) -> SuiteReport:
    """Run statements and invariants over every configured case."""
    depth = int(config.get("depth", 3))
    bound = int(config.get("large_lambda_bound", depth + 2))
    seed = int(config.get("seed", 0))
    statements = list(config.get("statements", STATEMENTS))
    invariants = list(config.get("invariants", INVARIANTS))
    suite = SuiteReport(meta={"depth": depth, "large_lambda_bound": bound, "seed": seed, "statements": statements, "invariants": invariants})
    for case in config.get("cases", config.get("case", [])):
        try:
            datum = _resolve_datum(case["datum"], config.get("_base"))
            n = datum.n
            lam = tuple(case.get("lambda", [1] * n))
            mu = tuple(case.get("mu", [1] * n))
            r = int(case.get("depth", depth))
            ctx = CaseContext(datum, lam, mu, r, corrupt=case.get("corrupt"))
            cb = int(case.get("large_lambda_bound", bound))
            jobs = [(sid, lambda sid=sid: CHECKS[sid](ctx)) for sid in case.get("statements", statements)]
            jobs += [(name, lambda name=name: run_invariant(name, ctx, cb, seed)) for name in case.get("invariants", invariants)]
            if case.get("large_lambda", config.get("large_lambda", True)) and not case.get("corrupt"):
                big = CaseContext(datum, (cb,) * n, mu, r)
                jobs += [(sid, lambda sid=sid: CHECKS[sid](big)) for sid in LARGE_LAMBDA if sid in case.get("statements", statements)]
            for name, job in jobs:
                try:
                    suite.reports.append(job())
                except Exception as exc:
                    rep = ctx.report(name)
                    rep.fail(error=f"{type(exc).__name__}: {exc}")
                    suite.reports.append(rep)
        except Exception as exc:  # report and keep going; the suite fails
            suite.errors.append(f"{case.get('datum')}: {type(exc).__name__}: {exc}")
    return suite


def sample_lattice_elements(data: CrystalData, count: int, max_height: int, seed: int = 0, coeff_range: int = 2):
    """Random A_0-combinations of lattice basis vectors: (alpha, vector) pairs."""
    rng = random.Random(seed)
    alphas = [a for a in data.module.alphas if 0 < sum(a) <= max_height and data.module.dim(a)]
    out = []
    for _ in range(count):
        alpha = rng.choice(alphas)
        vec = [ZERO] * data.module.dim(alpha)
        for v in data.lattices[alpha].vectors:
            c = LaurentPoly({e: rng.randint(-coeff_range, coeff_range) for e in range(0, 3)}).to_scalar()
            if rng.random() < 0.3:
                c = c * (ONE + qpow(1)).inverse()
            if c:
                vec = [x + c * y if y else x for x, y in zip(vec, v)]
        out.append((alpha, vec))
    return out
