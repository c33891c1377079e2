"""Direct-method search for polynomial first integrals.

An ansatz ``F = sum c_e z^e`` over all monomials of a fixed weight (weights
``(2, 2, k, k)`` on positions and momenta) with bounded momentum degree is
plugged into ``{H, F} = 0``; the coefficient equations form a sparse linear
system over Q(i) whose exact kernel is the space of integrals at that weight.

The system is assembled in bi-homogeneous coordinates, where ``H`` has two
terms, and results are mapped back to the caller's coordinates.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import backend
from .exactnum import GaussianRational, as_gr
from .mech import (
    FirstIntegral,
    HamiltonianSystem,
    bihom_to_natural,
    natural_to_bihom,
    poisson_bracket,
    to_bihomogeneous,
)
from .parser import render
from .poly import BIHOM, EVERY_WEIGHT, Monomial, Poly, monomial_key, p_eval, p_weight

__all__ = [
    "ExactMatrix",
    "exact_nullspace",
    "AnsatzSpec",
    "SearchReport",
    "enumerate_ansatz",
    "build_bracket_system",
    "direct_search",
    "scan",
    "in_span",
    "default_weight_cap",
]


# -- exact linear algebra -----------------------------------------------------
class ExactMatrix:
    """Sparse matrix over Q(i); ``rows[r]`` maps column -> nonzero entry."""

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict[int, GaussianRational]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: list[dict[int, GaussianRational]] = [dict() for _ in range(nrows)]
        if rows is not None:
            if len(rows) != nrows:
                raise ValueError("row count mismatch")
            for r, row in enumerate(rows):
                for c, v in row.items():
                    if not 0 <= c < ncols:
                        raise IndexError(f"column {c} out of range")
                    v = as_gr(v)
                    if v:
                        self.rows[r][c] = v

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "ExactMatrix":
        nrows = len(data)
        ncols = len(data[0]) if nrows else 0
        rows = []
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            rows.append({c: v for c, v in enumerate(row) if as_gr(v)})
        return cls(nrows, ncols, rows)

    def to_dense(self) -> list[list[GaussianRational]]:
        zero = GaussianRational(0)
        out = [[zero] * self.ncols for _ in range(self.nrows)]
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                out[r][c] = v
        return out

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def apply(self, v: dict[int, GaussianRational]) -> dict[int, GaussianRational]:
        out = {}
        for r, row in enumerate(self.rows):
            acc = GaussianRational(0)
            for c, x in row.items():
                y = v.get(c)
                if y is not None:
                    acc = acc + x * y
            if acc:
                out[r] = acc
        return out


def _integral_row(row: dict[int, GaussianRational]) -> dict[int, tuple[int, int]]:
    """Scale a Q(i) row to Gaussian integers with unit content."""
    L = 1
    for v in row.values():
        L = L * v.parts[2] // math.gcd(L, v.parts[2])
    out = {}
    g = 0
    for c, v in row.items():
        a, b, d = v.parts
        x, y = a * (L // d), b * (L // d)
        out[c] = (x, y)
        g = math.gcd(g, x, y)
    if g > 1:
        out = {c: (x // g, y // g) for c, (x, y) in out.items()}
    return out


def _components(M: ExactMatrix) -> list[tuple[list[int], list[int]]]:
    """Connected components of the row/column incidence graph (cols, rows)."""
    parent = list(range(M.ncols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in M.rows:
        it = iter(row)
        first = next(it, None)
        if first is None:
            continue
        rf = find(first)
        for c in it:
            rc = find(c)
            if rc != rf:
                if rc < rf:
                    rc, rf = rf, rc
                parent[rc] = rf
    cols: dict[int, list[int]] = {}
    for c in range(M.ncols):
        cols.setdefault(find(c), []).append(c)
    rows: dict[int, list[int]] = {}
    for r, row in enumerate(M.rows):
        if row:
            rows.setdefault(find(next(iter(row))), []).append(r)
    return [(cols[root], rows.get(root, [])) for root in sorted(cols)]


def _gi(x: tuple[int, int]) -> GaussianRational:
    return GaussianRational.from_parts(x[0], x[1], 1)


def _nullspace_sparse(M: ExactMatrix, kernels=None) -> list[dict[int, GaussianRational]]:
    kernels = kernels or backend.kernels
    basis: list[tuple[int, dict[int, GaussianRational]]] = []
    for cols, rows in _components(M):
        sub = [_integral_row(M.rows[r]) for r in rows]
        pivots, red = kernels.gauss_jordan(sub, cols)
        pivot_rows = [(p, red[r]) for p, r in sorted(pivots.items())]
        for f in cols:
            if f in pivots:
                continue
            v = {f: GaussianRational(1)}
            for p, R in pivot_rows:
                x = R.get(f)
                if x is not None:
                    v[p] = -_gi(x) / _gi(R[p])
            lead = v[min(v)]
            if lead != 1:
                inv = lead.inverse()
                v = {c: y * inv for c, y in v.items()}
            basis.append((f, v))
    basis.sort(key=lambda t: t[0])
    return [v for _, v in basis]


def exact_nullspace(M: ExactMatrix | Sequence[Sequence], kernels=None) -> list[list[GaussianRational]]:
    """Kernel basis of ``M`` over Q(i), one vector per free column.

    Fraction-free Gauss-Jordan with first-available pivots in column order;
    each vector is scaled so that its first nonzero entry is 1.
    """
    if not isinstance(M, ExactMatrix):
        M = ExactMatrix.from_dense(M)
    zero = GaussianRational(0)
    out = []
    for v in _nullspace_sparse(M, kernels):
        dense = [zero] * M.ncols
        for c, y in v.items():
            dense[c] = y
        out.append(dense)
    return out


# -- echelon helpers over Q(i) (small dimensions) -----------------------------
def _reduce(v: dict, basis: dict[int, dict]) -> dict:
    """Reduce ``v`` by a reduced echelon basis keyed by pivot column."""
    v = dict(v)
    for p in sorted(basis):
        x = v.get(p)
        if x is None:
            continue
        for c, y in basis[p].items():
            nv = v.get(c, GaussianRational(0)) - x * y
            if nv:
                v[c] = nv
            else:
                v.pop(c, None)
    return v


def _insert(v: dict, basis: dict[int, dict]) -> int | None:
    """Add ``v`` to the reduced echelon ``basis``; returns its pivot or None."""
    v = _reduce(v, basis)
    if not v:
        return None
    p = min(v)
    inv = v[p].inverse()
    v = {c: y * inv for c, y in v.items()}
    for q in list(basis):
        x = basis[q].get(p)
        if x is None:
            continue
        row = dict(basis[q])
        for c, y in v.items():
            nv = row.get(c, GaussianRational(0)) - x * y
            if nv:
                row[c] = nv
            else:
                row.pop(c, None)
        basis[q] = row
    basis[p] = v
    return p


# -- ansatz -------------------------------------------------------------------
def enumerate_ansatz(k: int, m: int, W: int) -> list[Monomial]:
    """Monomials of weight ``W`` under ``(2, 2, k, k)`` with momentum degree <= m.

    Ordered by descending graded-lex key (the printing order).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if m < 0 or W < 0:
        raise ValueError("m and W must be non-negative")
    out = []
    for b in range(0, m + 1):
        rest = W - k * b
        if rest < 0 or rest % 2:
            continue
        a = rest // 2
        for a1 in range(a + 1):
            for b1 in range(b + 1):
                out.append((a1, a - a1, b1, b - b1))
    out.sort(key=monomial_key, reverse=True)
    return out


@dataclass(frozen=True)
class AnsatzSpec:
    k: int
    m: int
    W: int
    weights: tuple[int, int, int, int]
    monomials: tuple[Monomial, ...]

    @classmethod
    def make(cls, k: int, m: int, W: int) -> "AnsatzSpec":
        return cls(k, m, W, (2, 2, k, k), tuple(enumerate_ansatz(k, m, W)))

    def poly(self, coeffs: dict[int, GaussianRational], vars=BIHOM) -> Poly:
        return Poly({self.monomials[c]: v for c, v in coeffs.items()}, vars)

    def vector(self, F: Poly) -> dict[int, GaussianRational]:
        """Coefficient vector of ``F`` in this ansatz (ValueError if outside)."""
        index = {e: j for j, e in enumerate(self.monomials)}
        out = {}
        for e, c in F.terms.items():
            j = index.get(e)
            if j is None:
                raise ValueError(f"monomial {e} is outside the ansatz")
            out[j] = c
        return out


def _check_weight_homogeneous(sys: HamiltonianSystem) -> None:
    w = p_weight(sys.H, sys.weights)
    if w is None or (w is not EVERY_WEIGHT and w != 2 * sys.k):
        raise ValueError(f"H is not weight-homogeneous of weight {2 * sys.k} under {sys.weights}")


def _bihom(sys: HamiltonianSystem) -> HamiltonianSystem:
    _check_weight_homogeneous(sys)
    return sys if sys.kinetic_form == "bihomogeneous" else to_bihomogeneous(sys)


def build_bracket_system(sys: HamiltonianSystem, ansatz: Sequence[Monomial]) -> tuple[ExactMatrix, list[Monomial]]:
    """Matrix of ``F -> {H, F}`` on the ansatz; also returns the row monomials.

    Columns follow ``ansatz``; rows are the monomials of weight ``W + k - 2``
    that occur, in descending graded-lex order.  The matrix is built in the
    coordinates of ``sys``.
    """
    _check_weight_homogeneous(sys)
    H = sys.H
    cols = []
    row_monos: set[Monomial] = set()
    for e in ansatz:
        b = poisson_bracket(H, Poly.monomial(e, 1, H.vars))
        cols.append(b)
        row_monos.update(b.terms)
    order = sorted(row_monos, key=monomial_key, reverse=True)
    index = {e: r for r, e in enumerate(order)}
    rows: list[dict[int, GaussianRational]] = [dict() for _ in order]
    for j, b in enumerate(cols):
        for e, c in b.terms.items():
            rows[index[e]][j] = c
    return ExactMatrix(len(order), len(ansatz), rows), order


# -- reports ------------------------------------------------------------------
@dataclass
class SearchReport:
    ansatz: AnsatzSpec
    kernel_dimension: int
    kernel_basis: list[Poly]
    trivial_subspace: list[Poly]
    novel_candidates: list[Poly]
    verified: bool
    numeric_bracket_max: float
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.ansatz.m

    @property
    def W(self) -> int:
        return self.ansatz.W

    def to_dict(self, with_timings: bool = False) -> dict:
        out = {
            "m": self.ansatz.m,
            "W": self.ansatz.W,
            "weights": list(self.ansatz.weights),
            "ansatz_size": len(self.ansatz.monomials),
            "kernel_dimension": self.kernel_dimension,
            "trivial_dimension": len(self.trivial_subspace),
            "kernel_basis": [render(F) for F in self.kernel_basis],
            "novel_candidates": [render(F) for F in self.novel_candidates],
            "verified": self.verified,
        }
        if with_timings:
            out["timings"] = dict(self.timings)
        return out


def _homogeneous_parts(F: Poly, w) -> list[tuple[int, Poly]]:
    parts: dict[int, dict] = {}
    for e, c in F.terms.items():
        parts.setdefault(sum(a * b for a, b in zip(e, w)), {})[e] = c
    return [(W, Poly(t, F.vars)) for W, t in sorted(parts.items()) if W > 0]


def _trivial_products(gens: list[tuple[int, int, Poly]], W: int, m: int) -> list[Poly]:
    """All products of generators (weight, momentum degree, poly) with weight
    ``W`` and momentum degree <= ``m``.  The empty product (the constant 1)
    is the only one at ``W = 0``."""
    if W == 0:
        return [Poly.const(1, BIHOM)]
    out: list[Poly] = []
    cache: dict[tuple[int, int], Poly] = {}

    def power(j, n):
        key = (j, n)
        if key not in cache:
            cache[key] = gens[j][2] ** n
        return cache[key]

    def rec(j, w_left, m_left, acc):
        if w_left == 0:
            if acc is not None:
                out.append(acc)
            return
        if j == len(gens):
            return
        wj, mj, _ = gens[j]
        n = 0
        while n * wj <= w_left and n * mj <= m_left:
            nxt = acc if n == 0 else (power(j, n) if acc is None else acc * power(j, n))
            rec(j + 1, w_left - n * wj, m_left - n * mj, nxt)
            n += 1

    rec(0, W, m, None)
    return out


def _numeric_bracket(H: Poly, F: Poly, seed: int = 0, points: int = 10) -> float:
    b = poisson_bracket(H, F)
    if b.is_zero():
        return 0.0
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        z = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        worst = max(worst, abs(p_eval(b, z)))
    return worst


def in_span(F: Poly, basis: Iterable[Poly]) -> bool:
    """Exact test ``F in span(basis)`` (same variable set)."""
    ech: dict[int, dict] = {}
    index: dict[Monomial, int] = {}

    def vec(P):
        out = {}
        for e, c in P.terms.items():
            if e not in index:
                index[e] = len(index)
            out[index[e]] = c
        return out

    for B in basis:
        _insert(vec(B), ech)
    return not _reduce(vec(F), ech)


def _generators(sys_b: HamiltonianSystem, known: Iterable[FirstIntegral | Poly]) -> list[tuple[int, int, Poly]]:
    w = sys_b.weights
    gens: list[tuple[int, int, Poly]] = [(2 * sys_b.k, 2, sys_b.H)]
    for item in known:
        J = item.J if isinstance(item, FirstIntegral) else item
        if J.vars != BIHOM:
            J = natural_to_bihom(J)
        for W, part in _homogeneous_parts(J, w):
            if not part.depends_on_momenta() and part.total_degree() == 0:
                continue
            gens.append((W, part.momentum_degree(), part))
    return gens


def _search_bihom(
    sys_b: HamiltonianSystem,
    m: int,
    W: int,
    gens: list[tuple[int, int, Poly]],
    kernels=None,
) -> tuple[AnsatzSpec, list[Poly], list[Poly], list[Poly], dict[str, float]]:
    t0 = time.perf_counter()
    spec = AnsatzSpec.make(sys_b.k, m, W)
    M, _ = build_bracket_system(sys_b, spec.monomials)
    t1 = time.perf_counter()
    kernel = _nullspace_sparse(M, kernels)
    t2 = time.perf_counter()
    trivial = _trivial_products(gens, W, m)
    ech: dict[int, dict] = {}
    for T in trivial:
        _insert(spec.vector(T), ech)
    trivial_pivots = set(ech)
    for v in kernel:
        _insert(v, ech)
    novel = [spec.poly(ech[p]) for p in sorted(ech) if p not in trivial_pivots]
    t3 = time.perf_counter()
    times = {"assemble": t1 - t0, "eliminate": t2 - t1, "reduce": t3 - t2}
    return spec, [spec.poly(v) for v in kernel], trivial, novel, times


def direct_search(
    sys: HamiltonianSystem,
    m: int,
    W: int,
    known: Sequence[FirstIntegral | Poly] = (),
    kernels=None,
    numeric_check: bool = True,
) -> SearchReport:
    """Integrals of weight ``W`` and momentum degree <= ``m``.

    ``known`` integrals (and ``H``) generate the trivial subspace; novel
    candidates are the kernel reduced modulo its span, in reduced echelon
    form with leading coefficient 1.  Every kernel element is re-verified
    by an independent bracket computation in the coordinates of ``sys``.
    """
    sys_b = _bihom(sys)
    gens = _generators(sys_b, known)
    spec, kernel, trivial, novel, times = _search_bihom(sys_b, m, W, gens, kernels)
    return _finish(sys, spec, kernel, trivial, novel, times, numeric_check)


def _finish(sys, spec, kernel, trivial, novel, times, numeric_check) -> SearchReport:
    t0 = time.perf_counter()
    back = (lambda F: F) if sys.kinetic_form == "bihomogeneous" else bihom_to_natural
    kernel = [back(F) for F in kernel]
    trivial = [back(F) for F in trivial]
    novel = [_normalize(back(F)) for F in novel]
    verified = all(poisson_bracket(sys.H, F).is_zero() for F in kernel + novel)
    worst = 0.0
    if numeric_check:
        for F in novel:
            worst = max(worst, _numeric_bracket(sys.H, F))
    times = dict(times)
    times["verify"] = time.perf_counter() - t0
    return SearchReport(spec, len(kernel), kernel, trivial, novel, verified, worst, times)


def _normalize(F: Poly) -> Poly:
    """Scale so the leading printed coefficient is 1."""
    items = F.items()
    if not items:
        return F
    lead = items[0][1]
    return F if lead == 1 else F.scale(lead.inverse())


def default_weight_cap(k: int, m: int) -> int:
    return 2 * k * m


def scan(
    sys: HamiltonianSystem,
    m_max: int,
    weight_cap: int | None = None,
    known: Sequence[FirstIntegral | Poly] = (),
    kernels=None,
    numeric_check: bool = True,
) -> list[SearchReport]:
    """Reports for ``m = 1..m_max`` and ``W = 1..m*k + cap`` (cap ``2km`` by default).

    Novel candidates found along the way join the known generators, so later
    weights only report integrals independent of everything found before.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    sys_b = _bihom(sys)
    k = sys_b.k
    known_b: list[Poly] = []
    for item in known:
        J = item.J if isinstance(item, FirstIntegral) else item
        known_b.append(J if J.vars == BIHOM else natural_to_bihom(J))
    reports = []
    for m in range(1, m_max + 1):
        cap = default_weight_cap(k, m) if weight_cap is None else weight_cap
        for W in range(1, m * k + cap + 1):
            gens = _generators(sys_b, known_b)
            spec, kernel, trivial, novel, times = _search_bihom(sys_b, m, W, gens, kernels)
            known_b.extend(novel)
            reports.append(_finish(sys, spec, kernel, trivial, novel, times, numeric_check))
    return reports
