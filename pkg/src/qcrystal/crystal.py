"""Crystal graphs: data structure, serialization, isomorphism, tensor products."""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .cartan import BorcherdsCartanDatum, WeightPoint, pairing


class DepthInsufficient(RuntimeError):
    """A computation needs weight spaces beyond the computed depth."""


class CrystalError(RuntimeError):
    """Computed data violates a crystal-basis property (implementation bug)."""


class _Infinity:
    """Symbolic +infinity for phi values.  Compares above every int; no arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("inf")

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def render_ext(x) -> object:
    return "inf" if x is INF else x


def parse_ext(x):
    return INF if x == "inf" else int(x)


def ext_gt(a, b) -> bool:
    """a > b for extended integers; b is asserted finite as the tensor rule needs."""
    if b is INF:
        raise ValueError("epsilon values are always finite")
    return a is INF or a > b


def ext_ge(a, b) -> bool:
    if b is INF:
        raise ValueError("epsilon values are always finite")
    return a is INF or a >= b


@dataclass(frozen=True)
class CrystalNode:
    id: str
    alpha: tuple
    lam: tuple
    eps: tuple
    phi: tuple
    residue: tuple = field(default=(), compare=False)

    @property
    def wt(self) -> WeightPoint:
        return WeightPoint(self.lam, self.alpha)

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "alpha": list(self.alpha),
            "lam": list(self.lam),
            "eps": list(self.eps),
            "phi": [render_ext(x) for x in self.phi],
        }


def alpha_tag(alpha: Sequence[int]) -> str:
    return ".".join(str(k) for k in alpha)


class CrystalGraph:
    """Nodes with (wt, eps, phi) and i-labeled edges b -> f~_i b."""

    def __init__(self, nodes: Iterable[CrystalNode], edges: Iterable[tuple], meta: Optional[dict] = None):
        self.nodes: List[CrystalNode] = list(nodes)
        self.edges: List[tuple] = [tuple(e) for e in edges]
        self.meta: dict = dict(meta or {})
        self.by_id: Dict[str, CrystalNode] = {n.id: n for n in self.nodes}
        if len(self.by_id) != len(self.nodes):
            raise CrystalError("duplicate node ids")
        self._out: Dict[tuple, str] = {}
        self._in: Dict[tuple, str] = {}
        for src, dst, i in self.edges:
            if (src, i) in self._out or (dst, i) in self._in:
                raise CrystalError(f"node has two {i}-edges at ({src}, {dst})")
            self._out[(src, i)] = dst
            self._in[(dst, i)] = src

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def n_index(self) -> int:
        return len(self.nodes[0].eps) if self.nodes else int(self.meta.get("rank", 0))

    def f(self, node_id: str, i: int) -> Optional[str]:
        return self._out.get((node_id, i))

    def e(self, node_id: str, i: int) -> Optional[str]:
        return self._in.get((node_id, i))

    def nodes_at(self, alpha) -> List[CrystalNode]:
        alpha = tuple(alpha)
        return [n for n in self.nodes if n.alpha == alpha]

    def highest_weight_nodes(self) -> List[CrystalNode]:
        return [n for n in self.nodes if all(self.e(n.id, i) is None for i in range(len(n.eps)))]

    def weight_problems(self) -> List[str]:
        """Edges that do not lower the weight by exactly alpha_i."""
        out = []
        for src, dst, i in self.edges:
            a, b = self.by_id[src].alpha, self.by_id[dst].alpha
            expect = tuple(x + (1 if k == i else 0) for k, x in enumerate(a))
            if b != expect:
                out.append(f"edge {src} -{i}-> {dst} moves alpha {a} to {b}")
        return out

    def counts_by_alpha(self) -> Dict[tuple, int]:
        return dict(Counter(n.alpha for n in self.nodes))

    # -- ordering and serialization ----------------------------------------

    def _order_key(self, n: CrystalNode):
        return (sum(n.alpha), n.alpha, n.residue, n.id)

    def ordered(self) -> "CrystalGraph":
        """BFS from highest-weight nodes along out-edges in index order."""
        rank = len(self.nodes[0].eps) if self.nodes else 0
        seen = set()
        order: List[CrystalNode] = []
        pending = sorted(self.nodes, key=self._order_key)
        roots = [n for n in pending if all(self.e(n.id, i) is None for i in range(rank))]
        for start in roots + pending:
            if start.id in seen:
                continue
            seen.add(start.id)
            queue = deque([start])
            while queue:
                node = queue.popleft()
                order.append(node)
                for i in range(rank):
                    nxt = self.f(node.id, i)
                    if nxt is not None and nxt not in seen:
                        seen.add(nxt)
                        queue.append(self.by_id[nxt])
        pos = {n.id: k for k, n in enumerate(order)}
        edges = sorted(self.edges, key=lambda e: (pos[e[0]], e[2]))
        return CrystalGraph(order, edges, self.meta)

    def to_dict(self) -> dict:
        g = self.ordered()
        labels = self.meta.get("labels") or [str(k + 1) for k in range(g.n_index)]
        return {
            "schema": "crystal/1",
            "nodes": [n.as_dict() for n in g.nodes],
            "edges": [{"src": s, "dst": d, "i": labels[i]} for s, d, i in g.edges],
            "meta": g.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=False) + "\n"

    def to_dot(self) -> str:
        g = self.ordered()
        labels = self.meta.get("labels") or [str(k + 1) for k in range(g.n_index)]
        ids = {n.id: f"n{k}" for k, n in enumerate(g.nodes)}
        lines = ["digraph crystal {"]
        for n in g.nodes:
            lines.append(f'  {ids[n.id]} [label="({",".join(str(k) for k in n.alpha)})"];')
        for s, d, i in g.edges:
            lines.append(f'  {ids[s]} -> {ids[d]} [label="{labels[i]}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def serialize(self, fmt: str = "json") -> bytes:
        if fmt == "json":
            return self.to_json().encode()
        if fmt == "dot":
            return self.to_dot().encode()
        raise ValueError(f"unknown format {fmt!r}")

    @classmethod
    def from_json(cls, text: str) -> "CrystalGraph":
        d = json.loads(text)
        meta = d.get("meta", {})
        nodes = [
            CrystalNode(
                id=n["id"],
                alpha=tuple(n["alpha"]),
                lam=tuple(n["lam"]),
                eps=tuple(n["eps"]),
                phi=tuple(parse_ext(x) for x in n["phi"]),
            )
            for n in d["nodes"]
        ]
        labels = meta.get("labels") or [str(k + 1) for k in range(len(nodes[0].eps) if nodes else 0)]
        edges = [(e["src"], e["dst"], labels.index(str(e["i"]))) for e in d["edges"]]
        return cls(nodes, edges, meta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CrystalGraph):
            return NotImplemented
        return set(self.nodes) == set(other.nodes) and set(self.edges) == set(other.edges)

    def __repr__(self) -> str:
        return f"CrystalGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"


def serialize(graph: CrystalGraph, fmt: str = "json") -> bytes:
    return graph.serialize(fmt)


def parse(data) -> CrystalGraph:
    if isinstance(data, bytes):
        data = data.decode()
    return CrystalGraph.from_json(data)


def phi_value(datum: BorcherdsCartanDatum, i: int, eps_i: int, wt: WeightPoint, imaginary_always_inf: bool = False):
    """phi_i from eps_i and the weight: eps + <h_i, wt> for real i, 0 or inf for imaginary i."""
    p = pairing(i, wt, datum)
    if datum.is_real(i):
        return eps_i + p
    if imaginary_always_inf:
        return INF
    if p < 0:
        raise CrystalError(f"negative pairing {p} at an imaginary index on {wt}")
    return INF if p > 0 else 0


# ---------------------------------------------------------------------------
# isomorphism testing
# ---------------------------------------------------------------------------


def _attrs(n: CrystalNode) -> tuple:
    return (n.alpha, n.lam, n.eps, tuple(str(x) for x in n.phi))


def _components(g: CrystalGraph) -> List[List[str]]:
    adj: Dict[str, set] = {n.id: set() for n in g.nodes}
    for s, d, _ in g.edges:
        adj[s].add(d)
        adj[d].add(s)
    seen, comps = set(), []
    for n in g.nodes:
        if n.id in seen:
            continue
        comp, stack = [], [n.id]
        seen.add(n.id)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _encode_from(g: CrystalGraph, root: str, rank: int):
    """Deterministic traversal from root; returns (encoding, visit order)."""
    order = [root]
    pos = {root: 0}
    steps = []
    k = 0
    while k < len(order):
        x = order[k]
        for i in range(rank):
            for direction, y in (("f", g.f(x, i)), ("e", g.e(x, i))):
                if y is None:
                    continue
                if y not in pos:
                    pos[y] = len(order)
                    order.append(y)
                steps.append((k, direction, i, pos[y]))
        k += 1
    enc = (tuple(_attrs(g.by_id[x]) for x in order), tuple(steps))
    return enc, order


def _canonical(g: CrystalGraph, comp: List[str], rank: int):
    roots = [x for x in comp if all(g.e(x, i) is None for i in range(rank))] or comp
    best = None
    for r in roots:
        enc, order = _encode_from(g, r, rank)
        if best is None or enc < best[0]:
            best = (enc, order)
    return best


@dataclass
class IsoResult:
    isomorphic: bool
    witness: Optional[Dict[str, str]] = None
    certificate: Optional[str] = None

    def __bool__(self) -> bool:
        return self.isomorphic


def graph_isomorphic(g1: CrystalGraph, g2: CrystalGraph) -> IsoResult:
    """Label-preserving isomorphism test.

    Each connected component is encoded canonically by traversing from its
    highest-weight nodes; the graphs are isomorphic iff the multisets of
    component encodings agree.  Returns the node bijection as a witness or a
    short discrepancy certificate.
    """
    if len(g1.nodes) != len(g2.nodes):
        return IsoResult(False, certificate=f"node count {len(g1.nodes)} != {len(g2.nodes)}")
    if len(g1.edges) != len(g2.edges):
        return IsoResult(False, certificate=f"edge count {len(g1.edges)} != {len(g2.edges)}")
    c1, c2 = Counter(_attrs(n) for n in g1.nodes), Counter(_attrs(n) for n in g2.nodes)
    if c1 != c2:
        diff = (c1 - c2) or (c2 - c1)
        return IsoResult(False, certificate=f"node label multisets differ, e.g. {next(iter(diff))}")
    rank = g1.n_index
    pool: Dict[tuple, List[List[str]]] = {}
    for comp in _components(g2):
        enc, order = _canonical(g2, comp, rank)
        pool.setdefault(enc, []).append(order)
    witness: Dict[str, str] = {}
    for comp in _components(g1):
        enc, order = _canonical(g1, comp, rank)
        match = pool.get(enc)
        if not match:
            head = g1.by_id[order[0]]
            return IsoResult(False, certificate=f"component rooted at {head.id} (alpha {head.alpha}, {len(order)} nodes) has no counterpart")
        other = match.pop()
        witness.update(zip(order, other))
    return IsoResult(True, witness=witness)


# ---------------------------------------------------------------------------
# combinatorial tensor product rule
# ---------------------------------------------------------------------------


def _factor_step(g: CrystalGraph, node: CrystalNode, i: int, op: str) -> Optional[str]:
    if op == "f":
        depth = g.meta.get("depth")
        if depth is not None and sum(node.alpha) + 1 > depth:
            raise DepthInsufficient(f"f~_{i} of {node.id} needs depth {sum(node.alpha) + 1} > {depth}")
        return g.f(node.id, i)
    return g.e(node.id, i)


def tensor_rule_edges(b1: CrystalNode, b2: CrystalNode, i: int, g1: CrystalGraph, g2: CrystalGraph):
    """(e~_i(b1 x b2), f~_i(b1 x b2)) as pairs of factor ids, or None for zero.

    f~ acts on the left factor iff phi_i(b1) > eps_i(b2); e~ acts on the left
    factor iff phi_i(b1) >= eps_i(b2).
    """
    phi, eps = b1.phi[i], b2.eps[i]
    if ext_ge(phi, eps):
        t = _factor_step(g1, b1, i, "e")
        e_target = None if t is None else (t, b2.id)
    else:
        t = _factor_step(g2, b2, i, "e")
        e_target = None if t is None else (b1.id, t)
    if ext_gt(phi, eps):
        t = _factor_step(g1, b1, i, "f")
        f_target = None if t is None else (t, b2.id)
    else:
        t = _factor_step(g2, b2, i, "f")
        f_target = None if t is None else (b1.id, t)
    return e_target, f_target


def tensor_id(a: str, b: str) -> str:
    return f"{a}|{b}"


def tensor_crystal_combinatorial(g1: CrystalGraph, g2: CrystalGraph, datum: BorcherdsCartanDatum, depth: int) -> CrystalGraph:
    """B1 x B2 restricted to total height <= depth, edges by the tensor rule."""
    for g in (g1, g2):
        if g.meta.get("depth") is not None and g.meta["depth"] < depth:
            raise DepthInsufficient(f"factor computed to depth {g.meta['depth']} < {depth}")
    lam = None
    pairs = []
    for a in g1.nodes:
        for b in g2.nodes:
            if sum(a.alpha) + sum(b.alpha) <= depth:
                pairs.append((a, b))
                lam = tuple(x + y for x, y in zip(a.lam, b.lam))
    rank = datum.n
    edges = []
    for a, b in pairs:
        if sum(a.alpha) + sum(b.alpha) + 1 > depth:
            continue
        for i in range(rank):
            _, ft = tensor_rule_edges(a, b, i, g1, g2)
            if ft is not None:
                edges.append((tensor_id(a.id, b.id), tensor_id(*ft), i))
    incoming = {(d, i): s for s, d, i in edges}
    nodes = []
    for a, b in pairs:
        nid = tensor_id(a.id, b.id)
        alpha = tuple(x + y for x, y in zip(a.alpha, b.alpha))
        wt = WeightPoint(lam, alpha)
        eps, phi = [], []
        for i in range(rank):
            k, cur = 0, nid
            while (cur, i) in incoming:
                cur = incoming[(cur, i)]
                k += 1
            eps.append(k)
            phi.append(phi_value(datum, i, k, wt))
        nodes.append(CrystalNode(nid, alpha, lam, tuple(eps), tuple(phi), a.residue + b.residue))
    meta = {
        "datum": datum.digest(),
        "labels": list(datum.labels),
        "depth": depth,
        "rank": rank,
        "lambda": g1.meta.get("lambda"),
        "mu": g2.meta.get("lambda"),
        "construction": "tensor-rule",
    }
    return CrystalGraph(nodes, edges, meta)


# ---------------------------------------------------------------------------
# algebraic tensor product V(lambda) x V(mu)
# ---------------------------------------------------------------------------


def _kron(a, b):
    from .linalg import QMatrix
    from .qarith import ZERO

    out = QMatrix.zeros(a.rows * b.rows, a.cols * b.cols)
    for i, ra in enumerate(a.data):
        for j, x in enumerate(ra):
            if not x:
                continue
            for k, rb in enumerate(b.data):
                row = out.data[i * b.rows + k]
                for l, y in enumerate(rb):
                    if y:
                        row[j * b.cols + l] = x * y
    return out


def _make_tensor_module():
    from .graded import GradedModule, shift
    from .linalg import QMatrix
    from .qarith import ZERO, qpow

    class TensorModule(GradedModule):
        """V(lambda) x V(mu) with the coproduct action.

        f_i acts as f_i x 1 + K_i x f_i and e_i as e_i x K_i^{-1} + 1 x e_i.
        The grade-alpha basis is the concatenation over (beta, gamma) with
        beta + gamma = alpha (beta lexicographic) of products of factor bases.
        """

        kind = "tensor"

        def __init__(self, m1, m2, depth: int):
            lam = tuple(x + y for x, y in zip(m1.lam, m2.lam))
            super().__init__(m1.datum, depth, lam=lam)
            self.m1, self.m2 = m1, m2
            self._blocks = {}
            self._f, self._e, self._g = {}, {}, {}

        def blocks(self, alpha):
            alpha = tuple(alpha)
            hit = self._blocks.get(alpha)
            if hit is None:
                out, pos = [], 0
                for beta in sorted(_sub_roots(alpha)):
                    gamma = tuple(a - b for a, b in zip(alpha, beta))
                    d1, d2 = self.m1.dim(beta), self.m2.dim(gamma)
                    if d1 and d2:
                        out.append((beta, gamma, pos, d1, d2))
                        pos += d1 * d2
                hit = self._blocks[alpha] = (out, pos)
            return hit

        def block_offset(self, alpha, beta):
            for b, g, pos, d1, d2 in self.blocks(alpha)[0]:
                if b == tuple(beta):
                    return pos, d1, d2
            return None

        def dim(self, alpha) -> int:
            if alpha is None or not self.in_range(alpha):
                return 0
            return self.blocks(alpha)[1]

        def _place(self, out, r0, c0, m, scale=None):
            for i, row in enumerate(m.data):
                orow = out.data[r0 + i]
                for j, x in enumerate(row):
                    if x:
                        orow[c0 + j] = orow[c0 + j] + (x * scale if scale is not None else x)

        def f_matrix(self, i: int, alpha):
            key = (i, tuple(alpha))
            if key in self._f:
                return self._f[key]
            target = shift(tuple(alpha), i, 1)
            self.require(target)
            out = QMatrix.zeros(self.dim(target), self.dim(alpha))
            s = self.datum.s[i]
            for beta, gamma, pos, d1, d2 in self.blocks(alpha)[0]:
                hit = self.block_offset(target, shift(beta, i, 1))
                if hit is not None:
                    tpos, t1, t2 = hit
                    self._place(out, tpos, pos, _kron(self.m1.f_matrix(i, beta), QMatrix.identity(d2)))
                hit = self.block_offset(target, beta)
                if hit is not None:
                    tpos, t1, t2 = hit
                    k = qpow(s * self.m1.pairing(i, beta))
                    self._place(out, tpos, pos, _kron(QMatrix.identity(d1), self.m2.f_matrix(i, gamma)), k)
            self._f[key] = out
            return out

        def e_matrix(self, i: int, alpha):
            key = (i, tuple(alpha))
            if key in self._e:
                return self._e[key]
            target = shift(tuple(alpha), i, -1)
            if target is None:
                out = QMatrix.zeros(0, self.dim(alpha))
            else:
                out = QMatrix.zeros(self.dim(target), self.dim(alpha))
                s = self.datum.s[i]
                for beta, gamma, pos, d1, d2 in self.blocks(alpha)[0]:
                    b2 = shift(beta, i, -1)
                    if b2 is not None:
                        hit = self.block_offset(target, b2)
                        if hit is not None:
                            k = qpow(-s * self.m2.pairing(i, gamma))
                            self._place(out, hit[0], pos, _kron(self.m1.e_matrix(i, beta), QMatrix.identity(d2)), k)
                    g2 = shift(gamma, i, -1)
                    if g2 is not None:
                        hit = self.block_offset(target, beta)
                        if hit is not None:
                            self._place(out, hit[0], pos, _kron(QMatrix.identity(d1), self.m2.e_matrix(i, gamma)))
            self._e[key] = out
            return out

        def gram(self, alpha):
            key = tuple(alpha)
            if key not in self._g:
                out = QMatrix.zeros(self.dim(alpha), self.dim(alpha))
                for beta, gamma, pos, d1, d2 in self.blocks(alpha)[0]:
                    self._place(out, pos, pos, _kron(self.m1.gram(beta), self.m2.gram(gamma)))
                self._g[key] = out
            return self._g[key]

        def embed(self, alpha, beta, u, v):
            """The vector u x v placed in the (beta, alpha - beta) block."""
            out = [ZERO] * self.dim(alpha)
            hit = self.block_offset(alpha, beta)
            if hit is None:
                return out
            pos, d1, d2 = hit
            for a, x in enumerate(u):
                if x:
                    for b, y in enumerate(v):
                        if y:
                            out[pos + a * d2 + b] = x * y
            return out

    return TensorModule


def _sub_roots(alpha):
    import itertools

    return [tuple(b) for b in itertools.product(*[range(k + 1) for k in alpha])]


_TensorModule = None


def tensor_module(m1, m2, depth: int):
    global _TensorModule
    if _TensorModule is None:
        _TensorModule = _make_tensor_module()
    return _TensorModule(m1, m2, depth)


def tensor_crystal_data(datum: BorcherdsCartanDatum, lam, mu, depth: int):
    """Product lattice L(lambda) x L(mu) and product crystal B(lambda) x B(mu)."""
    from fractions import Fraction

    from .graded import CrystalData
    from .linalg import LatticeBasis
    from .vrep import crystal_data

    c1 = crystal_data(datum, lam, depth)
    c2 = crystal_data(datum, mu, depth)
    t = tensor_module(c1.module, c2.module, depth)
    lattices, B, ids = {}, {}, {}
    for alpha in t.alphas:
        blocks, d = t.blocks(alpha)
        vecs, res, names = [], [], []
        for beta, gamma, pos, d1, d2 in blocks:
            l1, l2 = c1.lattices[beta], c2.lattices[gamma]
            for a in l1.vectors:
                for c in l2.vectors:
                    vecs.append(t.embed(alpha, beta, a, c))
        offset = 0
        for beta, gamma, pos, d1, d2 in blocks:
            for k1, r1 in enumerate(c1.B[beta]):
                for k2, r2 in enumerate(c2.B[gamma]):
                    r = [Fraction(0)] * d
                    for a, x in enumerate(r1):
                        for b, y in enumerate(r2):
                            r[offset + a * d2 + b] = x * y
                    res.append(tuple(r))
                    names.append(tensor_id(c1.node_id(beta, k1), c2.node_id(gamma, k2)))
            offset += d1 * d2
        lattices[alpha] = LatticeBasis(vecs, d)
        B[alpha] = res
        ids[alpha] = names
    return CrystalData(t, lattices, B, ids)


def tensor_crystal_algebraic(datum: BorcherdsCartanDatum, lam, mu, depth: int) -> CrystalGraph:
    """Crystal graph of V(lambda) x V(mu) computed from the coproduct action."""
    data = tensor_crystal_data(datum, lam, mu, depth)
    return data.graph(
        phi_mode="module",
        meta={"lambda": list(data.module.m1.lam), "mu": list(data.module.m2.lam), "construction": "coproduct"},
    )


def tensor_graphs(datum: BorcherdsCartanDatum, lam, mu, depth: int):
    """(combinatorial, algebraic) tensor crystal graphs."""
    from .vrep import crystal

    _, g1 = crystal(datum, lam, depth)
    _, g2 = crystal(datum, mu, depth)
    comb = tensor_crystal_combinatorial(g1, g2, datum, depth)
    alg = tensor_crystal_algebraic(datum, lam, mu, depth)
    return comb, alg
