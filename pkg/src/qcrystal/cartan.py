"""Borcherds-Cartan data, root/weight bookkeeping and the symmetric form.

Weights are never stored in a fundamental-weight basis.  A weight ``lambda - alpha``
is a :class:`WeightPoint`: the pairing vector ``(lambda(h_i))_i`` plus the
explicit root offset ``alpha`` (a tuple of non-negative ints).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

try:  # Python >= 3.11
    import tomllib
except ImportError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

RootVec = tuple  # tuple[int, ...] of non-negative multiplicities


class DatumError(ValueError):
    """Raised when a Borcherds-Cartan datum fails validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid Borcherds-Cartan datum: {lines}")


@dataclass(frozen=True)
class Violation:
    row: int
    col: int
    rule: str
    message: str

    def __str__(self) -> str:
        return f"({self.row}, {self.col}) {self.rule}: {self.message}"

    def as_dict(self) -> dict:
        return {"row": self.row, "col": self.col, "rule": self.rule, "message": self.message}


@dataclass(frozen=True)
class BorcherdsCartanDatum:
    """Finite index set ``0..n-1``, integer matrix ``A`` and symmetrizers ``s``."""

    A: tuple
    s: tuple
    labels: tuple = ()
    name: str = ""
    _real: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.A)
        object.__setattr__(self, "A", A)
        s = tuple(int(x) for x in self.s) if self.s else tuple(1 for _ in A)
        object.__setattr__(self, "s", s)
        labels = tuple(str(x) for x in self.labels) if self.labels else tuple(str(k + 1) for k in range(len(A)))
        object.__setattr__(self, "labels", labels)
        violations = validate(self)
        if violations:
            raise DatumError(violations)
        object.__setattr__(self, "_real", tuple(A[i][i] == 2 for i in range(len(A))))

    @property
    def n(self) -> int:
        return len(self.A)

    def is_real(self, i: int) -> bool:
        return self._real[i]

    def is_imaginary(self, i: int) -> bool:
        return not self._real[i]

    @property
    def real_indices(self) -> list:
        return [i for i in range(self.n) if self._real[i]]

    @property
    def imaginary_indices(self) -> list:
        return [i for i in range(self.n) if not self._real[i]]

    def c(self, i: int) -> int:
        """c_i = -a_ii / 2 for imaginary i."""
        if self._real[i]:
            raise ValueError(f"c_i is undefined for the real index {self.labels[i]}")
        return -self.A[i][i] // 2

    def string_c(self, i: int) -> int:
        """-a_ii / 2 for every index (so -1 for real i); the exponent used by P_i."""
        return -self.A[i][i] // 2

    def all_real_nonzero_diagonal(self) -> bool:
        return all(self.A[i][i] != 0 for i in range(self.n))

    def as_dict(self) -> dict:
        return {
            "matrix": [list(r) for r in self.A],
            "symmetrizers": list(self.s),
            "labels": list(self.labels),
        }

    def digest(self) -> str:
        blob = json.dumps({"matrix": self.as_dict()["matrix"], "symmetrizers": list(self.s)}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def label_index(self, label) -> int:
        return self.labels.index(str(label))


def validate(datum) -> list:
    """Check the Borcherds-Cartan conditions; return a list of :class:`Violation`.

    Works on any object with ``A`` and ``s`` attributes, so callers can
    validate raw data before constructing a datum.
    """
    A = datum.A
    s = datum.s or [1] * len(A)
    n = len(A)
    out = []
    for r, row in enumerate(A):
        if len(row) != n:
            out.append(Violation(r, -1, "square", f"row {r} has length {len(row)}, expected {n}"))
    if out:
        return out
    if len(s) != n:
        out.append(Violation(-1, -1, "symmetrizers", f"expected {n} symmetrizers, got {len(s)}"))
        return out
    for i in range(n):
        if s[i] <= 0:
            out.append(Violation(i, i, "symmetrizers", f"s_{i} = {s[i]} is not positive"))
    for i in range(n):
        for j in range(n):
            a = A[i][j]
            if a != int(a):
                out.append(Violation(i, j, "integrality", f"a_ij = {a} is not an integer"))
                continue
            if i == j:
                if not (a == 2 or (a <= 0 and a % 2 == 0)):
                    out.append(Violation(i, j, "a_ii = 2 or a_ii <= 0 (even)", f"a_ii = {a}"))
            else:
                if a > 0:
                    out.append(Violation(i, j, "a_ij <= 0 if i != j", f"a_ij = {a}"))
                if (a == 0) != (A[j][i] == 0):
                    out.append(Violation(i, j, "a_ij = 0 iff a_ji = 0", f"a_ij = {a}, a_ji = {A[j][i]}"))
            if s[i] * A[i][j] != s[j] * A[j][i]:
                out.append(Violation(i, j, "symmetrizability", f"s_i a_ij = {s[i] * a} != s_j a_ji = {s[j] * A[j][i]}"))
    return out


def classify(datum: BorcherdsCartanDatum) -> dict:
    """Real/imaginary split and c_i for imaginary indices."""
    return {
        "real": datum.real_indices,
        "imaginary": datum.imaginary_indices,
        "c": {i: datum.c(i) for i in datum.imaginary_indices},
    }


# ---------------------------------------------------------------------------
# roots and weights
# ---------------------------------------------------------------------------


def zero_root(n: int) -> RootVec:
    return (0,) * n


def simple_root(i: int, n: int, k: int = 1) -> RootVec:
    out = [0] * n
    out[i] = k
    return tuple(out)


def height(alpha: RootVec) -> int:
    return sum(alpha)


def root_add(a: RootVec, b: RootVec) -> RootVec:
    return tuple(x + y for x, y in zip(a, b))


def root_sub(a: RootVec, b: RootVec) -> Optional[RootVec]:
    """a - b, or None if the difference leaves Q_+."""
    out = tuple(x - y for x, y in zip(a, b))
    return None if any(x < 0 for x in out) else out


def add_simple(alpha: RootVec, i: int, k: int = 1) -> Optional[RootVec]:
    out = list(alpha)
    out[i] += k
    return None if out[i] < 0 else tuple(out)


def roots_of_height(n: int, r: int) -> list:
    """All alpha in Q_+ with |alpha| = r, in lexicographic order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(tuple(prefix + [remaining]))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + [k], remaining - k, slots - 1)

    if n == 0:
        return [()] if r == 0 else []
    rec([], r, n)
    return sorted(out)


def roots_up_to(n: int, depth: int) -> list:
    """Q_+(depth) ordered by height, then lexicographically."""
    out = []
    for r in range(depth + 1):
        out.extend(roots_of_height(n, r))
    return out


@dataclass(frozen=True, order=True)
class WeightPoint:
    """The weight lam - alpha, kept as (pairing vector of lam, alpha)."""

    lam: tuple
    alpha: tuple

    def pairing(self, i: int, datum: BorcherdsCartanDatum) -> int:
        return pairing(i, self, datum)

    def shift(self, i: int, k: int = -1) -> "WeightPoint":
        """Move by k*alpha_i (k = -1 means apply f_i)."""
        a = list(self.alpha)
        a[i] -= k
        return WeightPoint(self.lam, tuple(a))

    def __add__(self, other: "WeightPoint") -> "WeightPoint":
        return WeightPoint(root_add(self.lam, other.lam), root_add(self.alpha, other.alpha))


def pairing(i: int, mu: WeightPoint, datum: BorcherdsCartanDatum) -> int:
    """<h_i, lam - alpha> = lam_i - sum_j k_j a_ij."""
    A = datum.A
    return mu.lam[i] - sum(k * A[i][j] for j, k in enumerate(mu.alpha) if k)


def pairing_vec(lam: Sequence[int], alpha: RootVec, i: int, datum: BorcherdsCartanDatum) -> int:
    A = datum.A[i]
    return lam[i] - sum(k * A[j] for j, k in enumerate(alpha) if k)


def sym_bilinear(alpha: RootVec, mu: WeightPoint, datum: BorcherdsCartanDatum) -> int:
    """(alpha | mu) = sum_i k_i s_i mu(h_i)."""
    return sum(k * datum.s[i] * pairing(i, mu, datum) for i, k in enumerate(alpha) if k)


def root_form(alpha: RootVec, beta: RootVec, datum: BorcherdsCartanDatum) -> int:
    """(alpha | beta) on Q, from (alpha_i | alpha_j) = s_i a_ij."""
    return sum(a * b * datum.s[i] * datum.A[i][j] for i, a in enumerate(alpha) if a for j, b in enumerate(beta) if b)


def weight_of_word(word: Iterable[int], lam: Sequence[int], n: Optional[int] = None) -> WeightPoint:
    lam = tuple(lam)
    n = len(lam) if n is None else n
    alpha = [0] * n
    for i in word:
        alpha[i] += 1
    return WeightPoint(lam, tuple(alpha))


def is_dominant(lam: Sequence[int]) -> bool:
    return all(x >= 0 for x in lam)


# ---------------------------------------------------------------------------
# built-in data and config loading
# ---------------------------------------------------------------------------

BUILTIN = {
    "sl2": {"matrix": [[2]], "symmetrizers": [1], "labels": ["1"]},
    "heis": {"matrix": [[0]], "symmetrizers": [1], "labels": ["1"]},
    "imag2": {"matrix": [[-2]], "symmetrizers": [1], "labels": ["1"]},
    "gkm2": {"matrix": [[2, -1], [-1, 0]], "symmetrizers": [1, 1], "labels": ["1", "2"]},
    # indices -1, 1, 2 of the Monster matrix (-(i + j))
    "monster3": {
        "matrix": [[2, 0, -1], [0, -2, -3], [-1, -3, -4]],
        "symmetrizers": [1, 1, 1],
        "labels": ["-1", "1", "2"],
    },
}


def datum_from_dict(d: dict, name: str = "") -> BorcherdsCartanDatum:
    return BorcherdsCartanDatum(
        A=tuple(tuple(r) for r in d["matrix"]),
        s=tuple(d.get("symmetrizers") or ()),
        labels=tuple(d.get("labels") or ()),
        name=name or d.get("name", ""),
    )


def builtin(name: str) -> BorcherdsCartanDatum:
    return datum_from_dict(BUILTIN[name], name=name)


def load_datum(source: str) -> BorcherdsCartanDatum:
    """Load a datum from a JSON/TOML file, or by built-in name."""
    if source in BUILTIN:
        return builtin(source)
    path = Path(source)
    if not path.exists() and path.stem in BUILTIN:
        return builtin(path.stem)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        d = tomllib.loads(text)
    else:
        d = json.loads(text)
    return datum_from_dict(d, name=path.stem)
