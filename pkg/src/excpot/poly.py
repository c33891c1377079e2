"""Sparse polynomials in four phase-space variables over Q(i)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .exactnum import ONE, ZERO, GaussianRational, Number, as_gr

__all__ = [
    "VarSet",
    "NATURAL",
    "BIHOM",
    "Monomial",
    "Poly",
    "EVERY_WEIGHT",
    "VarSetMismatch",
    "monomial_key",
    "p_add",
    "p_mul",
    "p_diff",
    "p_subst_linear",
    "p_eval",
    "p_weight",
    "det4",
]

Monomial = tuple  # 4-tuple of non-negative ints


class VarSetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class VarSet:
    """Ordered phase-space variables: two positions followed by their momenta.

    Position ``j`` is canonically paired with momentum ``j``.
    """

    names: tuple[str, str, str, str]

    def __post_init__(self):
        if len(self.names) != 4 or len(set(self.names)) != 4:
            raise ValueError(f"need 4 distinct variable names, got {self.names!r}")

    @property
    def positions(self) -> tuple[str, str]:
        return self.names[0], self.names[1]

    @property
    def momenta(self) -> tuple[str, str]:
        return self.names[2], self.names[3]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}; expected one of {self.names}") from None

    def is_position(self, name: str) -> bool:
        return self.index(name) < 2

    def __str__(self):
        return "(" + ",".join(self.names) + ")"


NATURAL = VarSet(("q1", "q2", "p1", "p2"))
BIHOM = VarSet(("x1", "x2", "y1", "y2"))


def monomial_key(e: Monomial):
    """Sort key for graded-lex order; sort with ``reverse=True`` for descending."""
    return (sum(e), e)


class _EveryWeight:
    """Weight reported for the zero polynomial, which is homogeneous of every weight."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "EVERY_WEIGHT"

    def __bool__(self):
        return False


EVERY_WEIGHT = _EveryWeight()


class Poly:
    """Immutable sparse polynomial ``{exponent-tuple: coefficient}``.

    Zero coefficients are never stored, so equality is term-map equality.
    """

    __slots__ = ("_terms", "vars", "_hash")

    def __init__(self, terms: Mapping[Monomial, Number] | None = None, vars: VarSet = NATURAL):
        clean: dict[Monomial, GaussianRational] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != 4 or min(e) < 0:
                    raise ValueError(f"bad exponent tuple {e!r}")
                c = as_gr(c)
                if c:
                    clean[e] = clean.get(e, ZERO) + c
                    if not clean[e]:
                        del clean[e]
        self._terms = clean
        self.vars = vars
        self._hash = None

    @classmethod
    def _from_clean(cls, terms: dict, vars: VarSet) -> "Poly":
        obj = object.__new__(cls)
        obj._terms = terms
        obj.vars = vars
        obj._hash = None
        return obj

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls, vars: VarSet = NATURAL) -> "Poly":
        return cls._from_clean({}, vars)

    @classmethod
    def const(cls, c: Number, vars: VarSet = NATURAL) -> "Poly":
        c = as_gr(c)
        return cls._from_clean({(0, 0, 0, 0): c} if c else {}, vars)

    @classmethod
    def var(cls, name: str, vars: VarSet = NATURAL) -> "Poly":
        e = [0, 0, 0, 0]
        e[vars.index(name)] = 1
        return cls._from_clean({tuple(e): ONE}, vars)

    @classmethod
    def monomial(cls, e: Monomial, c: Number = 1, vars: VarSet = NATURAL) -> "Poly":
        return cls({tuple(e): c}, vars)

    @classmethod
    def gens(cls, vars: VarSet = NATURAL) -> tuple["Poly", "Poly", "Poly", "Poly"]:
        return tuple(cls.var(n, vars) for n in vars.names)

    # -- container protocol ----------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return self._terms

    def items(self) -> list[tuple[Monomial, GaussianRational]]:
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: monomial_key(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Monomial, GaussianRational]]:
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, e: Monomial) -> GaussianRational:
        return self._terms.get(tuple(e), ZERO)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self._terms == other._terms
        c = as_gr(other, strict=False)
        if c is None:
            return NotImplemented
        return self._terms == ({(0, 0, 0, 0): c} if c else {})

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise VarSetMismatch(f"variable sets differ: {self.vars} vs {other.vars}")
            return other
        c = as_gr(other, strict=False)
        if c is None:
            return None
        return Poly.const(c, self.vars)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for e, c in o._terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._from_clean(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Poly._from_clean({e: -c for e, c in self._terms.items()}, self.vars)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c: Number) -> "Poly":
        c = as_gr(c)
        if not c:
            return Poly.zero(self.vars)
        return Poly._from_clean({e: v * c for e, v in self._terms.items()}, self.vars)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = as_gr(other, strict=False)
            if c is None:
                return NotImplemented
            return self.scale(c)
        o = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            a0, a1, a2, a3 = e1
            for e2, c2 in o._terms.items():
                e = (a0 + e2[0], a1 + e2[1], a2 + e2[2], a3 + e2[3])
                p = c1 * c2
                s = out.get(e)
                out[e] = p if s is None else s + p
        return Poly._from_clean({e: c for e, c in out.items() if c}, self.vars)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_gr(other, strict=False)
        if c is None:
            return NotImplemented
        return self.scale(c.inverse())

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial exponent must be a non-negative int")
        result = Poly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus / structure ------------------------------------------
    def diff(self, var: str | int) -> "Poly":
        j = var if isinstance(var, int) else self.vars.index(var)
        out = {}
        for e, c in self._terms.items():
            n = e[j]
            if n:
                f = list(e)
                f[j] = n - 1
                out[tuple(f)] = c * n
        return Poly._from_clean(out, self.vars)

    def gradient(self) -> tuple["Poly", "Poly", "Poly", "Poly"]:
        return tuple(self.diff(j) for j in range(4))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def position_degree(self) -> int:
        return max((e[0] + e[1] for e in self._terms), default=-1)

    def momentum_degree(self) -> int:
        return max((e[2] + e[3] for e in self._terms), default=-1)

    def depends_on_momenta(self) -> bool:
        return any(e[2] or e[3] for e in self._terms)

    def is_homogeneous(self) -> bool:
        """True for the zero polynomial as well."""
        return len({sum(e) for e in self._terms}) <= 1

    def weight(self, w: Sequence[int]):
        return p_weight(self, w)

    def relabel(self, vars: VarSet) -> "Poly":
        """Same term map over a different variable set (pure renaming)."""
        return Poly._from_clean(dict(self._terms), vars)

    def permute(self, perm: Sequence[int]) -> "Poly":
        """Variable permutation: variable ``j`` is replaced by variable ``perm[j]``."""
        out = {}
        for e, c in self._terms.items():
            f = [0, 0, 0, 0]
            for j in range(4):
                f[perm[j]] += e[j]
            out[tuple(f)] = c
        return Poly._from_clean(out, self.vars)

    def subst_linear(self, M, target: VarSet) -> "Poly":
        return p_subst_linear(self, M, target)

    def __call__(self, *z):
        if len(z) == 1:
            z = z[0]
        return p_eval(self, z)

    def __str__(self):
        from .parser import render

        return render(self)

    def __repr__(self):
        return f"Poly({self}, vars={self.vars})"


def p_add(f: Poly, g: Poly) -> Poly:
    if f.vars != g.vars:
        raise VarSetMismatch(f"variable sets differ: {f.vars} vs {g.vars}")
    return f + g


def p_mul(f: Poly, g: Poly) -> Poly:
    if f.vars != g.vars:
        raise VarSetMismatch(f"variable sets differ: {f.vars} vs {g.vars}")
    return f * g


def p_diff(f: Poly, var: str) -> Poly:
    return f.diff(var)


def det4(M) -> GaussianRational:
    """Exact determinant of a square matrix over Q(i) by Gaussian elimination."""
    A = [[as_gr(x) for x in row] for row in M]
    n = len(A)
    det = ONE
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return ZERO
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        piv = A[c][c]
        det = det * piv
        inv = piv.inverse()
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] * inv
                A[r] = [A[r][j] - f * A[c][j] for j in range(n)]
    return det


def p_subst_linear(f: Poly, M, target: VarSet) -> Poly:
    """Replace old variable ``j`` of ``f`` by ``sum_k M[j][k] * target_k``.

    Raises ``ValueError`` when ``M`` is singular over Q(i).
    """
    M = [[as_gr(x) for x in row] for row in M]
    if len(M) != 4 or any(len(r) != 4 for r in M):
        raise ValueError("substitution matrix must be 4x4")
    if not det4(M):
        raise ValueError("singular substitution matrix")
    lin = []
    for j in range(4):
        t = {}
        for k in range(4):
            if M[j][k]:
                e = [0, 0, 0, 0]
                e[k] = 1
                t[tuple(e)] = M[j][k]
        lin.append(Poly._from_clean(t, target))
    cache: dict[tuple[int, int], Poly] = {}

    def power(j: int, n: int) -> Poly:
        key = (j, n)
        if key not in cache:
            if n == 0:
                cache[key] = Poly.const(1, target)
            else:
                cache[key] = power(j, n - 1) * lin[j]
        return cache[key]

    result = Poly.zero(target)
    for e, c in f.terms.items():
        term = Poly.const(c, target)
        for j in range(4):
            if e[j]:
                term = term * power(j, e[j])
        result = result + term
    return result


def p_eval(f: Poly, z: Sequence[complex]) -> complex:
    """Direct term-by-term complex evaluation."""
    z = [complex(v) for v in z]
    total = 0j
    for e, c in f.terms.items():
        t = complex(c)
        for j in range(4):
            if e[j]:
                t *= z[j] ** e[j]
        total += t
    return total


def p_weight(f: Poly, w: Sequence[int]):
    """Common weighted degree of every term, ``None`` if mixed.

    The zero polynomial returns :data:`EVERY_WEIGHT`.
    """
    weights = {sum(wi * ei for wi, ei in zip(w, e)) for e in f.terms}
    if not weights:
        return EVERY_WEIGHT
    if len(weights) == 1:
        return weights.pop()
    return None


def from_terms(items: Iterable[tuple[Monomial, Number]], vars: VarSet) -> Poly:
    return Poly(dict(items), vars)
