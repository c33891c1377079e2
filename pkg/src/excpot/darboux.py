"""Darboux points of planar homogeneous potentials.

A direction ``d`` in CP^1 is a Darboux point when ``V'(d) = lambda d``.  For a
homogeneous ``V(q1, q2)`` the directions where the gradient is parallel to
the position are the zeros of ``D = q1 dV/dq2 - q2 dV/dq1``, a binary form of
degree ``k``.  Roots are found on the chart ``[1:x]`` from the square-free
parts of ``d(x) = D(1, x)`` (exact Yun decomposition over Q(i)), with the
Aberth-Ehrlich iteration for the numeric roots; ``[0:1]`` carries the
remaining multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exactnum import GaussianRational
from .parser import render
from .poly import Poly

__all__ = [
    "CONVENTION",
    "DarbouxRoot",
    "DarbouxReport",
    "darboux_polynomial",
    "dehomogenize",
    "squarefree_decomposition",
    "aberth",
    "projective_roots",
    "classify",
    "darboux_report",
]

CONVENTION = "V'(d) = lambda*d with |d| = 1; isotropic directions (d1^2 + d2^2 = 0) are never proper"

PROPER_TOL = 1e-9
ISOTROPY_TOL = 1e-9


def _check_potential(V: Poly) -> None:
    if V.depends_on_momenta():
        raise ValueError("potential depends on momenta")
    if not V.is_zero() and not V.is_homogeneous():
        raise ValueError("potential is not homogeneous")


def darboux_polynomial(V: Poly) -> Poly:
    """``q1 dV/dq2 - q2 dV/dq1`` (positions are the first two variables)."""
    _check_potential(V)
    q1, q2, _, _ = Poly.gens(V.vars)
    return q1 * V.diff(1) - q2 * V.diff(0)


# -- univariate arithmetic over Q(i); coefficient lists, lowest degree first --
_Z = GaussianRational(0)


def _trim(a: list) -> list:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _deriv(a: list) -> list:
    return _trim([a[j] * j for j in range(1, len(a))])


def _sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _trim([(a[j] if j < len(a) else _Z) - (b[j] if j < len(b) else _Z) for j in range(n)])


def _divmod(a: list, b: list) -> tuple[list, list]:
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [_Z] * max(len(a) - len(b) + 1, 0)
    inv = b[-1].inverse()
    while len(a) >= len(b) and a:
        s = len(a) - len(b)
        c = a[-1] * inv
        q[s] = c
        for j, bj in enumerate(b):
            a[s + j] = a[s + j] - c * bj
        a = _trim(a)
    return _trim(q), a


def _monic(a: list) -> list:
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _gcd(a: list, b: list) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a) if a else a


def _exact_div(a: list, b: list) -> list:
    q, r = _divmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def squarefree_decomposition(a: Sequence[GaussianRational]) -> list[tuple[list, int]]:
    """Yun's algorithm: ``[(f_i, i)]`` with ``a = c * prod f_i^i``, ``f_i`` monic square-free."""
    f = _trim(list(a))
    if len(f) <= 1:
        return []
    f = _monic(f)
    df = _deriv(f)
    a0 = _gcd(f, df)
    b = _exact_div(f, a0)
    c = _exact_div(df, a0)
    d = _sub(c, _deriv(b))
    out = []
    i = 1
    while len(b) > 1:
        g = _gcd(b, d)
        if len(g) > 1:
            out.append((g, i))
        b = _exact_div(b, g)
        c = _exact_div(d, g)
        d = _sub(c, _deriv(b))
        i += 1
    return out


# -- numeric roots ------------------------------------------------------------
def aberth(coeffs: Sequence[complex], tol: float = 1e-12, max_sweeps: int = 200, seed: int = 0) -> np.ndarray:
    """All roots of ``sum coeffs[j] x^j`` by Aberth-Ehrlich iteration.

    The initial guesses sit on a circle of Cauchy-bound radius with a seeded
    angular offset.  Stops once every correction is below ``tol`` relative to
    ``max(1, |z|)`` or after ``max_sweeps`` sweeps.
    """
    c = np.array(coeffs, dtype=complex)
    while len(c) and c[-1] == 0:
        c = c[:-1]
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    hi = c[::-1]  # numpy polyval order
    dhi = np.polyder(hi)
    radius = 1 + np.max(np.abs(c[:-1] / c[-1]))
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0, 2 * np.pi)
    z = 0.5 * radius * np.exp(1j * (phase + 2 * np.pi * np.arange(n) / n + 0.25))
    for _ in range(max_sweeps):
        p = np.polyval(hi, z)
        dp = np.polyval(dhi, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = (1.0 / diff).sum(axis=1) - 1.0  # remove the diagonal 1/1
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / dp
            corr = w / (1 - w * s)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z = z - corr
        if np.all(np.abs(corr) <= tol * np.maximum(1.0, np.abs(z))):
            break
    return z


def dehomogenize(D: Poly) -> list[GaussianRational]:
    """Coefficients of ``d(x) = D(1, x)``, lowest degree first."""
    if D.is_zero():
        return []
    n = D.total_degree()
    out = [_Z] * (n + 1)
    for e, c in D.terms.items():
        out[e[1]] = out[e[1]] + c
    return _trim(out)


def projective_roots(D: Poly, seed: int = 0) -> list[tuple[tuple[complex, complex], int]]:
    """Roots of the binary form ``D`` in CP^1 with multiplicities.

    Finite roots are ``(1, x)``; the point at infinity is ``(0, 1)``.  Sorted
    by (real, imaginary) part of ``x`` with infinity last.
    """
    if D.is_zero():
        raise ValueError("zero polynomial: every direction is a root")
    if D.depends_on_momenta() or not D.is_homogeneous():
        raise ValueError("expected a binary form in the positions")
    n = D.total_degree()
    d = dehomogenize(D)
    out = []
    for f, mult in squarefree_decomposition(d):
        if len(f) == 2:  # exact linear factor
            r = -f[0] / f[1]
            out.append(((1 + 0j, complex(r)), mult))
            continue
        for r in aberth([complex(c) for c in f], seed=seed):
            out.append(((1 + 0j, complex(r)), mult))
    out.sort(key=lambda t: (round(t[0][1].real, 12), round(t[0][1].imag, 12)))
    inf = n - (len(d) - 1)
    if inf > 0:
        out.append(((0j, 1 + 0j), inf))
    return out


def _normalized(d: tuple[complex, complex]) -> np.ndarray:
    v = np.array(d, dtype=complex)
    return v / np.linalg.norm(v)


def classify(V: Poly, root: tuple[complex, complex], tol: float = PROPER_TOL) -> tuple[str, complex | None, float]:
    """``(kind, lambda, residual)`` at the direction ``root``.

    ``kind`` is ``"improper"`` when the gradient vanishes, ``"isotropic"``
    when it does not but ``d1^2 + d2^2 = 0``, and ``"proper"`` otherwise.  ``lambda = <V'(d), conj d>`` with ``|d| = 1``.
    """
    d = _normalized(root)
    z = (d[0], d[1], 0j, 0j)
    g = np.array([V.diff(0)(*z), V.diff(1)(*z)], dtype=complex)
    lam = complex(np.vdot(d, g))  # conj(d) . g
    residual = float(np.linalg.norm(g - lam * d))
    if np.linalg.norm(g) <= tol:
        return "improper", None, residual
    if abs(d[0] ** 2 + d[1] ** 2) < ISOTROPY_TOL:
        return "isotropic", lam, residual
    return "proper", lam, residual


@dataclass
class DarbouxRoot:
    point: tuple[complex, complex]
    multiplicity: int
    isotropic: bool
    kind: str
    proper: bool
    lam: complex | None
    residual: float
    poly_residual: float

    def to_dict(self) -> dict:
        return {
            "point": [_cjson(self.point[0]), _cjson(self.point[1])],
            "multiplicity": self.multiplicity,
            "isotropic": self.isotropic,
            "kind": self.kind,
            "proper": self.proper,
            "lambda": None if self.lam is None else _cjson(self.lam),
            "residual": _fjson(self.residual),
            "poly_residual": _fjson(self.poly_residual),
        }


def _fjson(x: float) -> float:
    return float(f"{x:.6e}")


def _cjson(z: complex) -> list[float]:
    return [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]


@dataclass
class DarbouxReport:
    potential: str
    darboux_poly: Poly
    degenerate: bool
    roots: list[DarbouxRoot] = field(default_factory=list)
    convention: str = CONVENTION

    @property
    def proper_points(self) -> list[DarbouxRoot]:
        return [r for r in self.roots if r.proper]

    def to_dict(self) -> dict:
        return {
            "potential": self.potential,
            "darboux_polynomial": render(self.darboux_poly),
            "degenerate": self.degenerate,
            "convention": self.convention,
            "proper_count": len(self.proper_points),
            "roots": [r.to_dict() for r in self.roots],
        }


def darboux_report(V: Poly, tol: float = PROPER_TOL, seed: int = 0) -> DarbouxReport:
    """Darboux polynomial, its projective roots and their classification.

    A zero Darboux polynomial (e.g. ``(q1^2 + q2^2)^l``) sets ``degenerate``:
    every direction is parallel to the gradient.
    """
    _check_potential(V)
    D = darboux_polynomial(V)
    if D.is_zero():
        return DarbouxReport(render(V), D, True)
    d = [complex(c) for c in dehomogenize(D)]
    norm = float(np.linalg.norm(d))
    roots = []
    for point, mult in projective_roots(D, seed=seed):
        kind, lam, res = classify(V, point, tol)
        if point[0] == 0:
            pres = 0.0
        else:
            pres = abs(np.polyval(d[::-1], point[1])) / norm
        dn = _normalized(point)
        iso = bool(abs(dn[0] ** 2 + dn[1] ** 2) < ISOTROPY_TOL)
        roots.append(DarbouxRoot(point, mult, iso, kind, kind == "proper", lam, res, pres))
    return DarbouxReport(render(V), D, False, roots)
