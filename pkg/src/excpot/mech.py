"""Hamiltonian systems with exceptional potentials and their first integrals.

Coordinates
-----------
Natural coordinates are ``(q1, q2, p1, p2)`` with ``H = (p1^2 + p2^2)/2 + V(q)``.
Bi-homogeneous coordinates are ``(x1, x2, y1, y2)`` with::

    x1 = q1 + i q2,   x2 = q1 - i q2,   y1 = (p1 - i p2)/2,   y2 = (p1 + i p2)/2

which turns the kinetic energy into ``2 y1 y2`` and ``V_{k,l}`` into
``beta x1^l x2^(k-l)`` with ``beta = (-1)^l i^k alpha``.

Poisson bracket convention: ``{F, G} = sum_j dF/dp_j dG/dq_j - dF/dq_j dG/dp_j``,
so ``{H, F}`` is the time derivative of ``F`` and ``{p1, q1} = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exactnum import I, ONE, GaussianRational, Number, as_gr
from .parser import parse, render
from .poly import BIHOM, NATURAL, Poly, VarSet, VarSetMismatch, p_subst_linear

__all__ = [
    "HamiltonianSystem",
    "FirstIntegral",
    "CatalogEntry",
    "Po2cMatrix",
    "TO_BIHOM",
    "TO_NATURAL",
    "exceptional_potential",
    "beta_of",
    "alpha_of",
    "natural_system",
    "bihomogeneous_system",
    "exceptional_system",
    "to_bihomogeneous",
    "to_natural",
    "natural_to_bihom",
    "bihom_to_natural",
    "poisson_bracket",
    "is_first_integral",
    "catalog",
    "catalog_item",
    "catalog_item_ids",
    "applicable_items",
    "TABLE1",
    "table1_row",
    "table1_potential",
    "hamiltonian_vector_field",
    "functional_independence",
    "apply_po2c",
    "SWAP_XY",
    "PRINTED_ITEM6_COEFF",
    "item6_family",
]

_h = GaussianRational(1, 0) / 2
_ih = I / 2

# Old natural variables written in bi-homogeneous variables (rows: q1, q2, p1, p2).
TO_BIHOM = [
    [_h, _h, 0, 0],
    [-_ih, _ih, 0, 0],
    [0, 0, 1, 1],
    [0, 0, I, -I],
]
# Old bi-homogeneous variables written in natural variables (rows: x1, x2, y1, y2).
TO_NATURAL = [
    [1, I, 0, 0],
    [1, -I, 0, 0],
    [0, 0, _h, -_ih],
    [0, 0, _h, _ih],
]

# x1 <-> x2, y1 <-> y2
SWAP_XY = (1, 0, 3, 2)

PRINTED_ITEM6_COEFF = 6
ITEM6_COEFF = 16


def natural_to_bihom(f: Poly) -> Poly:
    """Express a natural-coordinate polynomial in bi-homogeneous coordinates."""
    if f.vars != NATURAL:
        raise VarSetMismatch(f"expected natural variables, got {f.vars}")
    return p_subst_linear(f, TO_BIHOM, BIHOM)


def bihom_to_natural(f: Poly) -> Poly:
    """Express a bi-homogeneous polynomial in natural coordinates."""
    if f.vars != BIHOM:
        raise VarSetMismatch(f"expected bi-homogeneous variables, got {f.vars}")
    return p_subst_linear(f, TO_NATURAL, NATURAL)


def beta_of(k: int, l: int, alpha: Number) -> GaussianRational:
    """``beta = (-1)^l i^k alpha``."""
    return (-1) ** l * I**k * as_gr(alpha)


def alpha_of(k: int, l: int, beta: Number) -> GaussianRational:
    """Inverse of :func:`beta_of`."""
    return as_gr(beta) / ((-1) ** l * I**k)


def exceptional_potential(k: int, l: int, alpha: Number = 1, vars: VarSet = NATURAL) -> Poly:
    """``alpha (q2 - i q1)^l (q2 + i q1)^(k-l)``; bi-homogeneous ``beta x1^l x2^(k-l)``."""
    if k < 1:
        raise ValueError(f"degree k must be positive, got {k}")
    if not 0 <= l <= k:
        raise ValueError(f"l must lie in [0, {k}], got {l}")
    alpha = as_gr(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    if vars == BIHOM:
        return Poly.monomial((l, k - l, 0, 0), beta_of(k, l, alpha), BIHOM)
    if vars != NATURAL:
        raise ValueError(f"unsupported variable set {vars}")
    q1, q2, _, _ = Poly.gens(NATURAL)
    return (q2 - q1 * I) ** l * (q2 + q1 * I) ** (k - l) * alpha


@dataclass(frozen=True)
class HamiltonianSystem:
    """``H = kinetic + V`` in either coordinate convention."""

    H: Poly
    k: int
    kinetic_form: str  # "natural" | "bihomogeneous"
    l: int | None = None
    alpha: GaussianRational | None = None

    def __post_init__(self):
        if self.kinetic_form not in ("natural", "bihomogeneous"):
            raise ValueError(f"unknown kinetic form {self.kinetic_form!r}")
        V = self.potential
        if V.depends_on_momenta():
            raise ValueError("H minus its kinetic part depends on momenta")
        if not V.is_zero() and (not V.is_homogeneous() or V.total_degree() != self.k):
            raise ValueError(f"potential is not homogeneous of degree {self.k}")

    @property
    def vars(self) -> VarSet:
        return self.H.vars

    @property
    def kinetic(self) -> Poly:
        if self.kinetic_form == "natural":
            _, _, p1, p2 = Poly.gens(self.vars)
            return (p1 * p1 + p2 * p2) / 2
        _, _, y1, y2 = Poly.gens(self.vars)
        return y1 * y2 * 2

    @property
    def potential(self) -> Poly:
        return self.H - self.kinetic

    @property
    def beta(self) -> GaussianRational | None:
        if self.l is None or self.alpha is None:
            return None
        return beta_of(self.k, self.l, self.alpha)

    @property
    def weights(self) -> tuple[int, int, int, int]:
        return (2, 2, self.k, self.k)

    def label(self) -> str:
        if self.l is not None:
            return f"V_{{{self.k},{self.l}}}(alpha={self.alpha})"
        return render(self.potential)


def natural_system(V: Poly) -> HamiltonianSystem:
    """``H = (p1^2 + p2^2)/2 + V`` for a homogeneous ``V(q1, q2)``."""
    if V.vars != NATURAL:
        raise VarSetMismatch("natural system needs (q1,q2,p1,p2)")
    if V.is_zero() or not V.is_homogeneous():
        raise ValueError("potential must be a nonzero homogeneous polynomial")
    _, _, p1, p2 = Poly.gens(NATURAL)
    return HamiltonianSystem((p1 * p1 + p2 * p2) / 2 + V, V.total_degree(), "natural")


def bihomogeneous_system(V: Poly) -> HamiltonianSystem:
    """``H = 2 y1 y2 + V`` for a homogeneous ``V(x1, x2)``."""
    if V.vars != BIHOM:
        raise VarSetMismatch("bi-homogeneous system needs (x1,x2,y1,y2)")
    if V.is_zero() or not V.is_homogeneous():
        raise ValueError("potential must be a nonzero homogeneous polynomial")
    _, _, y1, y2 = Poly.gens(BIHOM)
    return HamiltonianSystem(y1 * y2 * 2 + V, V.total_degree(), "bihomogeneous")


def exceptional_system(k: int, l: int, alpha: Number = 1, coords: str = "natural") -> HamiltonianSystem:
    """System of ``V_{k,l}``; ``coords`` is ``"natural"`` or ``"bihomogeneous"``."""
    vars = NATURAL if coords == "natural" else BIHOM
    if coords not in ("natural", "bihomogeneous"):
        raise ValueError(f"unknown coordinates {coords!r}")
    V = exceptional_potential(k, l, alpha, vars)
    base = natural_system(V) if coords == "natural" else bihomogeneous_system(V)
    return HamiltonianSystem(base.H, k, base.kinetic_form, l, as_gr(alpha))


def to_bihomogeneous(sys: HamiltonianSystem) -> HamiltonianSystem:
    if sys.kinetic_form != "natural" or sys.vars != NATURAL:
        raise ValueError("system is not in natural coordinates")
    return HamiltonianSystem(natural_to_bihom(sys.H), sys.k, "bihomogeneous", sys.l, sys.alpha)


def to_natural(sys: HamiltonianSystem) -> HamiltonianSystem:
    if sys.kinetic_form != "bihomogeneous" or sys.vars != BIHOM:
        raise ValueError("system is not in bi-homogeneous coordinates")
    return HamiltonianSystem(bihom_to_natural(sys.H), sys.k, "natural", sys.l, sys.alpha)


def poisson_bracket(F: Poly, G: Poly, vars: VarSet | None = None) -> Poly:
    """``sum_j dF/dp_j dG/dq_j - dF/dq_j dG/dp_j``."""
    if F.vars != G.vars or (vars is not None and vars != F.vars):
        raise VarSetMismatch(f"variable sets differ: {F.vars} vs {G.vars}")
    out = Poly.zero(F.vars)
    for j in range(2):
        out = out + F.diff(j + 2) * G.diff(j) - F.diff(j) * G.diff(j + 2)
    return out


def is_first_integral(sys: HamiltonianSystem, F: Poly) -> bool:
    return poisson_bracket(sys.H, F).is_zero()


# -- catalog ----------------------------------------------------------------
@dataclass(frozen=True)
class FirstIntegral:
    J: Poly
    provenance: str  # "prop1-item-N", "table1-row-N", "search", "user"
    verified: bool = False


@dataclass(frozen=True)
class CatalogEntry:
    k: int
    l: int
    item: int
    alpha: GaussianRational
    beta: GaussianRational
    J_bihom: Poly
    J_natural: Poly
    notes: tuple[str, ...] = field(default=())

    def system(self, coords: str = "bihomogeneous") -> HamiltonianSystem:
        return exceptional_system(self.k, self.l, self.alpha, coords)

    def integral(self, coords: str = "bihomogeneous") -> FirstIntegral:
        J = self.J_bihom if coords == "bihomogeneous" else self.J_natural
        return FirstIntegral(J, f"prop1-item-{self.item}", is_first_integral(self.system(coords), J))


def catalog_item_ids() -> tuple[int, ...]:
    return (1, 2, 3, 4, 5, 6, 7)


def applicable_items(k: int, l: int) -> list[int]:
    """Catalog items whose (k, l) pattern matches, in item order."""
    items = []
    if l == 0:
        items.append(1)
    if l == k:
        items.append(2)
    if k % 2 == 0 and 2 * l == k:
        items.append(3)
    if l == 1:
        items.append(4)
    if l == k - 1:
        items.append(5)
    if (k, l) == (7, 2):
        items.append(6)
    if (k, l) == (7, 5):
        items.append(7)
    return items


def item6_family(a: Number = ITEM6_COEFF) -> Poly:
    """Integral ansatz for ``2 y1 y2 + x1^2 x2^5`` with leading coefficient ``a``."""
    x1, x2, y1, y2 = Poly.gens(BIHOM)
    return (
        y1**3 * (y1 * x1 - y2 * x2) * as_gr(a)
        + x2**6 * (y1**2 * x1**2 * 4 - y1 * y2 * x1 * x2 * 8 + y2**2 * x2**2)
        - x1**3 * x2**12
    )


def _scaled_seven(J_unit: Poly, beta: GaussianRational) -> Poly:
    """Integral for ``beta x1^a x2^b`` (a+b=7) from the one for ``beta = 1``.

    With ``X = beta x`` and ``Y = beta^3 y`` one has
    ``beta^6 H = 2 Y1 Y2 + X1^a X2^b``, a conformally canonical rescaling.
    """
    if beta == ONE:
        return J_unit
    b3 = beta**3
    return p_subst_linear(
        J_unit,
        [[beta, 0, 0, 0], [0, beta, 0, 0], [0, 0, b3, 0], [0, 0, 0, b3]],
        BIHOM,
    )


def catalog_item(item: int, k: int, alpha: Number | None = None) -> CatalogEntry:
    """Entry for one item of the integrable list, in both coordinate systems.

    ``alpha=None`` means 1 for items 1-5 and the value giving ``beta = 1``
    for items 6-7 (``alpha = i`` and ``alpha = -i``).
    """
    x1, x2, y1, y2 = Poly.gens(BIHOM)
    notes: list[str] = []
    if item == 1:
        l = 0
    elif item == 2:
        l = k
    elif item == 3:
        if k % 2:
            raise ValueError("item 3 needs even k")
        l = k // 2
    elif item == 4:
        l = 1
    elif item == 5:
        l = k - 1
    elif item in (6, 7):
        if k != 7:
            raise ValueError("items 6 and 7 only exist for k = 7")
        l = 2 if item == 6 else 5
    else:
        raise ValueError(f"unknown catalog item {item}")
    if not 0 <= l <= k:
        raise ValueError(f"item {item} not defined for k={k}")
    if alpha is None:
        alpha = alpha_of(k, l, 1) if item in (6, 7) else ONE
    alpha = as_gr(alpha)
    if not alpha:
        raise ValueError("alpha must be nonzero")
    beta = beta_of(k, l, alpha)
    ik = I**k
    if item == 1:
        J = y1
    elif item == 2:
        J = y2
    elif item == 3:
        J = y1 * x1 - y2 * x2
    elif item == 4:
        J = y1**2 - x2**k * (ik * alpha / k)
    elif item == 5:
        J = y2**2 + x1**k * ((-1) ** (k + 1) * ik * alpha / k)
    else:
        J6 = item6_family(ITEM6_COEFF)
        J_unit = J6 if item == 6 else J6.permute(SWAP_XY)
        J = _scaled_seven(J_unit, beta)
        notes.append(
            "leading coefficient 16 (the bracket forces 16; the printed "
            f"algebraic-integrability list shows {PRINTED_ITEM6_COEFF})"
        )
    return CatalogEntry(k, l, item, alpha, beta, J, bihom_to_natural(J), tuple(notes))


def catalog(k: int, l: int, alpha: Number | None = None) -> CatalogEntry | None:
    """First applicable catalog entry for ``V_{k,l}``, or ``None``."""
    if k < 1 or not 0 <= l <= k:
        return None
    items = applicable_items(k, l)
    if not items:
        return None
    return catalog_item(items[0], k, alpha)


# -- Table of integrals in natural variables --------------------------------
# Rows as printed, with k and alpha substituted; potentials written the way
# the table writes them.  Row 6/7 potentials carry no alpha: they equal the
# exceptional potential at alpha = i and alpha = -i respectively.
TABLE1 = {
    1: ("alpha*(q2+i*q1)^{k}", "1/2*(p1-i*p2)"),
    2: ("alpha*(q2-i*q1)^{k}", "1/2*(p1+i*p2)"),
    3: ("alpha*(q2-i*q1)^{h}*(q2+i*q1)^{h}", "-i/2*(p1*q2-q1*p2)"),
    4: ("alpha*(q2-i*q1)*(q2+i*q1)^{km1}", "1/4*(p1-i*p2)^2 - 1/{k}*i^{k}*alpha*(q1-i*q2)^{k}"),
    5: ("alpha*(q2-i*q1)^{km1}*(q2+i*q1)", "1/4*(p1+i*p2)^2 + 1/{k}*(-1)^{kp1}*i^{k}*alpha*(q1+i*q2)^{k}"),
    6: (
        "(q1-i*q2)^5*(q1+i*q2)^2",
        "-(p1-i*p2)^3*(p1+i*p2)*(q1-i*q2) + 1/4*(p1+i*p2)^2*(q1-i*q2)^8"
        " + (p1-i*p2)^4*(q1+i*q2) - 2*(p1-i*p2)*(p1+i*p2)*(q1-i*q2)^7*(q1+i*q2)"
        " + (p1-i*p2)^2*(q1-i*q2)^6*(q1+i*q2)^2 - (q1-i*q2)^12*(q1+i*q2)^3",
    ),
    7: (
        "(q1-i*q2)^2*(q1+i*q2)^5",
        "(p1+i*p2)^4*(q1-i*q2) - (p1-i*p2)*(p1+i*p2)^3*(q1+i*q2)"
        " + (p1+i*p2)^2*(q1-i*q2)^2*(q1+i*q2)^6"
        " - 2*(p1-i*p2)*(p1+i*p2)*(q1-i*q2)*(q1+i*q2)^7"
        " + 1/4*(p1-i*p2)^2*(q1+i*q2)^8 - (q1-i*q2)^3*(q1+i*q2)^12",
    ),
}


def _fill(template: str, k: int, alpha: GaussianRational) -> str:
    text = (
        template.replace("{km1}", str(k - 1))
        .replace("{kp1}", str(k + 1))
        .replace("{h}", str(k // 2))
        .replace("{k}", str(k))
    )
    return text.replace("alpha", f"({alpha})")


def table1_potential(row: int, k: int = 7, alpha: Number = 1) -> Poly:
    return parse(_fill(TABLE1[row][0], k, as_gr(alpha)), NATURAL)


def table1_row(row: int, k: int = 7, alpha: Number = 1) -> tuple[Poly, Poly]:
    """(potential, integral) of a table row in natural variables."""
    pot, integral = TABLE1[row]
    a = as_gr(alpha)
    return parse(_fill(pot, k, a), NATURAL), parse(_fill(integral, k, a), NATURAL)


# -- vector field / independence -------------------------------------------
def hamiltonian_vector_field(sys: HamiltonianSystem) -> tuple[Poly, Poly, Poly, Poly]:
    """``(dH/dp1, dH/dp2, -dH/dq1, -dH/dq2)`` in the variable-set order."""
    H = sys.H
    return (H.diff(2), H.diff(3), -H.diff(0), -H.diff(1))


def functional_independence(sys: HamiltonianSystem, F: Poly, trials: int = 10, seed: int = 0) -> bool:
    """Numerical rank-2 test of the Jacobian ``[grad H; grad F]`` at seeded points."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    from .poly import p_eval

    rng = np.random.default_rng(seed)
    gH = sys.H.gradient()
    gF = F.gradient()
    for _ in range(trials):
        z = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        jac = np.array([[p_eval(g, z) for g in gH], [p_eval(g, z) for g in gF]])
        s = np.linalg.svd(jac, compute_uv=False)
        if s[0] > 0 and s[-1] / s[0] > 1e-8:
            return True
    return False


# -- PO(2, C) -----------------------------------------------------------------
@dataclass(frozen=True)
class Po2cMatrix:
    """2x2 matrix with ``A A^T = scale * I``, ``scale != 0``."""

    A: tuple[tuple[GaussianRational, GaussianRational], tuple[GaussianRational, GaussianRational]]
    scale: GaussianRational = field(init=False)

    def __post_init__(self):
        A = tuple(tuple(as_gr(x) for x in row) for row in self.A)
        if len(A) != 2 or any(len(r) != 2 for r in A):
            raise ValueError("PO(2,C) element must be 2x2")
        object.__setattr__(self, "A", A)
        (a, b), (c, d) = A
        s11 = a * a + b * b
        s12 = a * c + b * d
        s22 = c * c + d * d
        if s12 or s11 != s22 or not s11:
            raise ValueError("matrix does not satisfy A A^T = alpha I with alpha != 0")
        object.__setattr__(self, "scale", s11)


def apply_po2c(A: Po2cMatrix | Sequence[Sequence[Number]], V: Poly) -> Poly:
    """``V(A q)`` on the position variables; momenta untouched."""
    if not isinstance(A, Po2cMatrix):
        A = Po2cMatrix(A)
    (a, b), (c, d) = A.A
    M = [[a, b, 0, 0], [c, d, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
    return p_subst_linear(V, M, V.vars)
