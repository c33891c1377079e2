"""Numeric flow, invariant planes, particular solutions and variational equations.

Trajectories are integrated over real time with complex phase-space values
by classical RK4 (``backend.kernels.rk4_integrate``).  The ``dd`` option
runs the same scheme in double-double arithmetic, which is needed to see the
truncation error of small steps below the double rounding floor.

For ``k = 2l`` the potential is ``alpha (q1^2 + q2^2)^l`` and every line
``q2 = c q1`` carries planar motion ``x'' = mu x^(2l-1)`` with
``mu = -2 l alpha (c^2 + 1)^(l-1)``.  On the zero-energy level the solutions
are ``x(t) = (b1 + b2 t)^(-1/(l-1))`` with ``b2^2 = mu (l-1)^2 / l``, and the
variational equation becomes a Cauchy-Euler system with a constant
symmetric 2x2 block.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import backend
from .exactnum import GaussianRational, as_gr
from .mech import HamiltonianSystem, exceptional_potential, hamiltonian_vector_field
from .poly import NATURAL, Poly

__all__ = [
    "PhaseState",
    "Trajectory",
    "PlaneCertificate",
    "ParticularSolution",
    "VariationalSystem",
    "ExponentReport",
    "FundamentalPath",
    "DegeneratePlaneError",
    "J2",
    "pack_polys",
    "sample_initial_states",
    "integrate_hamilton",
    "evaluate",
    "conservation_drift",
    "invariant_plane_test",
    "particular_solution",
    "variational_system",
    "exponent_analysis",
    "integrate_variational",
    "PRINTED_NU_RELATION",
]

J2 = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]], dtype=complex)

# Relation between nu and mu as printed in the source derivation; the one
# consistent with x'' = mu x^(2l-1) at zero energy is mu = 4 nu^2 l.
PRINTED_NU_RELATION = "-2*nu^2 = mu/(l+1)"


class DegeneratePlaneError(ValueError):
    """``mu = 0``: the plane dynamics is free motion, no Cauchy-Euler structure."""


# -- phase states and packing ----------------------------------------------
@dataclass(frozen=True)
class PhaseState:
    z: tuple[complex, complex, complex, complex]
    t: float = 0.0

    def __post_init__(self):
        z = tuple(complex(v) for v in self.z)
        if len(z) != 4:
            raise ValueError("phase state needs 4 components (q1, q2, p1, p2)")
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in z):
            raise ValueError("phase state has non-finite components")
        if not math.isfinite(self.t):
            raise ValueError("non-finite time")
        object.__setattr__(self, "z", z)


def _split(q: Fraction) -> tuple[float, float]:
    hi = float(q)
    return hi, float(q - Fraction(hi))


def _quad(c: GaussianRational) -> tuple[float, float, float, float]:
    return _split(c.re) + _split(c.im)


def pack_polys(polys: Sequence[Poly]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten polynomials into the ``(exps, coefs, offsets)`` kernel layout."""
    exps, coefs, offsets = [], [], [0]
    for P in polys:
        for e, c in P.items():
            exps.append(e)
            coefs.append(_quad(c))
        offsets.append(len(exps))
    return (
        np.array(exps, dtype=np.int64).reshape(-1, 4),
        np.array(coefs, dtype=np.float64).reshape(-1, 4),
        np.array(offsets, dtype=np.int64),
    )


def _to_quad(z: Sequence[complex]) -> np.ndarray:
    return np.array([[v.real, 0.0, v.imag, 0.0] for v in map(complex, z)], dtype=np.float64)


def _from_quad(Z: np.ndarray) -> np.ndarray:
    """(..., 4, 4) quadruples -> (..., 4) complex doubles."""
    return (Z[..., 0] + Z[..., 1]) + 1j * (Z[..., 2] + Z[..., 3])


def sample_initial_states(n: int, seed: int = 0, radius: float = 0.5) -> list[PhaseState]:
    """``n`` states with every component uniform in the complex disc ``|z| <= radius``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        r = radius * np.sqrt(rng.uniform(0, 1, 4))
        th = rng.uniform(0, 2 * np.pi, 4)
        out.append(PhaseState(tuple(r * np.exp(1j * th))))
    return out


# -- Hamiltonian flow ---------------------------------------------------------
@dataclass
class Trajectory:
    """Samples of an RK4 run; ``raw`` keeps the double-double quadruples."""

    times: np.ndarray
    raw: np.ndarray
    dd: bool
    dt: float
    steps: int
    requested_steps: int
    diagnostic: str | None = None

    @property
    def blown_up(self) -> bool:
        return self.steps < self.requested_steps

    @property
    def states(self) -> list[PhaseState]:
        Z = _from_quad(self.raw)
        return [PhaseState(tuple(z), float(t)) for z, t in zip(Z, self.times)]

    def __len__(self):
        return len(self.times)

    def __iter__(self) -> Iterator[PhaseState]:
        return iter(self.states)

    def __getitem__(self, i) -> PhaseState:
        return self.states[i]


def integrate_hamilton(
    sys: HamiltonianSystem,
    z0: PhaseState | Sequence[complex],
    t_end: float,
    dt: float,
    stride: int = 1,
    dd: bool = False,
    kernels=None,
) -> Trajectory:
    """Fixed-step RK4 for Hamilton's equations of ``sys`` on ``[0, t_end]``.

    Every ``stride``-th state is kept.  A non-finite state stops the run; the
    trajectory is then truncated and carries a diagnostic.
    """
    if not dt > 0 or not t_end > 0:
        raise ValueError("dt and t_end must be positive")
    if not isinstance(z0, PhaseState):
        z0 = PhaseState(tuple(z0))
    kernels = kernels or backend.kernels
    nsteps = int(round(t_end / dt))
    exps, coefs, offs = pack_polys(hamiltonian_vector_field(sys))
    raw, done = kernels.rk4_integrate(exps, coefs, offs, _to_quad(z0.z), float(dt), nsteps, int(stride), bool(dd))
    stride = max(1, int(stride))
    times = z0.t + dt * stride * np.arange(len(raw))
    diag = None
    if done < nsteps:
        diag = f"non-finite state after step {done} (t = {z0.t + done * dt:.6g}); trajectory truncated"
    return Trajectory(times, raw, bool(dd), float(dt), int(done), nsteps, diag)


def evaluate(F: Poly, traj: Trajectory, dd: bool | None = None, kernels=None) -> np.ndarray:
    """``F`` along the samples; (m, 4) quadruples."""
    kernels = kernels or backend.kernels
    dd = traj.dd if dd is None else dd
    exps, coefs, _ = pack_polys([F])
    if len(exps) == 0:
        return np.zeros((len(traj.raw), 4))
    return kernels.poly_eval(exps, coefs, traj.raw, dd)


def conservation_drift(traj: Trajectory, integrals: Sequence[Poly], dd: bool | None = None, kernels=None) -> list[float]:
    """``max_t |F(z(t)) - F(z(0))| / max(1, |F(z(0))|)`` for each integral."""
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    out = []
    for F in integrals:
        vals = evaluate(F, traj, dd, kernels)
        d = vals - vals[0]
        diff = (d[:, 0] + d[:, 1]) + 1j * (d[:, 2] + d[:, 3])
        f0 = complex(vals[0, 0] + vals[0, 1], vals[0, 2] + vals[0, 3])
        out.append(float(np.max(np.abs(diff)) / max(1.0, abs(f0))))
    return out


# -- invariant planes -----------------------------------------------------------
def _on_line(P: Poly, u, v) -> Poly:
    """``P(u s, v s)`` as a polynomial in ``s`` (written as ``q1``); P position-only."""
    out: dict = {}
    for (a, b, _, _), coef in P.terms.items():
        key = (a + b, 0, 0, 0)
        out[key] = out.get(key, GaussianRational(0)) + coef * u**a * v**b
    return Poly(out, NATURAL)


@dataclass
class PlaneCertificate:
    """Outcome for the plane ``(q2, p2) = c (q1, p1)``; ``c=None`` is ``q1 = p1 = 0``.

    ``residual`` is ``u dV/dq2 - v dV/dq1`` restricted to the line ``s (u, v)``,
    a polynomial in ``s`` that vanishes exactly when the plane is invariant.
    """

    k: int
    l: int
    c: object
    invariant: bool
    exact: bool
    criterion: bool
    residual: Poly | float

    def __bool__(self):
        return self.invariant

    @property
    def agrees_with_criterion(self) -> bool:
        return self.invariant == self.criterion


def invariant_plane_test(k: int, l: int, c, alpha=1) -> PlaneCertificate:
    """Check invariance of ``{q2 = c q1, p2 = c p1}`` under the ``V_{k,l}`` flow.

    On the plane ``q2' = c q1'`` holds identically, so invariance reduces to
    ``p2' = c p1'``, i.e. the gradient being parallel to ``(1, c)`` along the
    line.  Exact for ``c`` in Q(i); otherwise evaluated at sample points.
    The returned ``criterion`` is ``(c^2 + 1)(2l - k) = 0``.
    """
    if not 0 <= l <= k:
        raise ValueError("need 0 <= l <= k")
    V = exceptional_potential(k, l, alpha)
    Vq1, Vq2 = V.diff(0), V.diff(1)
    cx = as_gr(c, strict=False) if c is not None and not isinstance(c, complex) else None
    if c is None:
        u, v = GaussianRational(0), GaussianRational(1)
        crit = k == 2 * l
    elif cx is not None:
        u, v = GaussianRational(1), cx
        crit = (cx * cx + 1) * (2 * l - k) == 0
    else:
        cc = complex(c)
        crit = abs((cc * cc + 1) * (2 * l - k)) < 1e-12
        s = np.exp(1j * np.linspace(0.1, 6.0, 7)) * np.linspace(0.5, 1.5, 7)
        worst = 0.0
        for sv in s:
            z = (sv, cc * sv, 0j, 0j)
            worst = max(worst, abs(Vq2(*z) - cc * Vq1(*z)) / max(1.0, abs(sv) ** (k - 1)))
        return PlaneCertificate(k, l, c, worst < 1e-10, False, bool(crit), worst)
    res = _on_line(Vq2.scale(u) - Vq1.scale(v), u, v)
    return PlaneCertificate(k, l, c, res.is_zero(), True, bool(crit), res)


# -- particular solutions -------------------------------------------------------
def _exact_or_complex(x):
    return x if isinstance(x, GaussianRational) else complex(x)


def _sqrt(x):
    if isinstance(x, GaussianRational):
        r = x.sqrt()
        if r is not None:
            return r
        x = complex(x)
    return cmath.sqrt(x)


@dataclass
class ParticularSolution:
    """Zero-energy solution ``x(t) = (b1 + b2 t)^(-1/(l-1))`` of ``x'' = mu x^(2l-1)``."""

    l: int
    alpha: object
    c: object
    branch: int
    c1: complex
    mu: object
    nu: object
    b1: complex
    b2: object
    residual: float = 0.0
    energy_residual: float = 0.0
    printed_relation_energy_residual: float = 0.0
    discrepancies: list[str] = field(default_factory=list)

    @property
    def t0(self) -> complex:
        return -complex(self.b1) / complex(self.b2)

    def g(self, t):
        return complex(self.b1) + complex(self.b2) * t

    def x(self, t):
        return self.g(t) ** (-1.0 / (self.l - 1))

    def xdot(self, t):
        l, b2 = self.l, complex(self.b2)
        return -b2 / (l - 1) * self.g(t) ** (-1.0 / (l - 1) - 1)

    def xddot(self, t):
        l, b2 = self.l, complex(self.b2)
        a = 1.0 / (l - 1)
        return b2 * b2 * a * (a + 1) * self.g(t) ** (-a - 2)

    def state(self, t) -> tuple[complex, complex, complex, complex]:
        """Phase point ``(x, c x, x', c x')`` on the plane."""
        c = complex(self.c)
        x, v = self.x(t), self.xdot(t)
        return (x, c * x, v, c * v)

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "alpha": str(self.alpha),
            "c": str(self.c),
            "branch": "+" if self.branch > 0 else "-",
            "mu": str(self.mu),
            "nu": str(self.nu),
            "b1": _cj(self.b1),
            "b2": str(self.b2),
            "t0": _cj(self.t0),
            "ode_residual": float(f"{self.residual:.3e}"),
            "energy_residual": float(f"{self.energy_residual:.3e}"),
            "printed_relation_energy_residual": float(f"{self.printed_relation_energy_residual:.3e}"),
            "discrepancies": list(self.discrepancies),
        }


def _cj(z) -> list[float]:
    z = complex(z)
    return [round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0]


def _sample_times(sol: ParticularSolution, n: int = 50, seed: int = 0, radius: float = 2.0) -> list[complex]:
    """Complex sample times in a disc, avoiding ``|b1 + b2 t| < 0.1`` and the
    branch cut of the principal root (arguments near the negative axis)."""
    rng = np.random.default_rng(seed)
    out: list[complex] = []
    while len(out) < n:
        r = radius * math.sqrt(rng.uniform())
        t = r * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        g = sol.g(t)
        if abs(g) >= 0.1 and abs(cmath.phase(g)) < math.pi - 0.1:
            out.append(t)
    return out


def particular_solution(l: int, alpha=1, c=1, branch: int = 1, c1: complex = 1) -> ParticularSolution:
    """Constants of the zero-energy solution on the plane ``q2 = c q1`` of ``V_{2l,l}``.

    ``mu = -2 l alpha (c^2+1)^(l-1)``, ``nu`` is the principal root of
    ``mu / (4 l)``, ``b1 = c1 (l-1)`` and ``b2 = +-2 nu (l-1)``.  Residuals of
    the ODE and of the energy relation are measured at 50 sample times.
    """
    if l < 2:
        raise ValueError("l >= 2 required (l = 1 is the harmonic case)")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    a = as_gr(alpha, strict=False) if not isinstance(alpha, complex) else None
    cc = as_gr(c, strict=False) if not isinstance(c, complex) else None
    if a is not None and cc is not None:
        mu = a * (cc * cc + 1) ** (l - 1) * (-2 * l)
        nu = _sqrt(mu / (4 * l))
        b2 = nu * (2 * (l - 1) * branch) if isinstance(nu, GaussianRational) else nu * 2 * (l - 1) * branch
        alpha_v, c_v = a, cc
    else:
        alpha_v, c_v = complex(alpha), complex(c)
        mu = -2 * l * alpha_v * (c_v * c_v + 1) ** (l - 1)
        nu = cmath.sqrt(mu / (4 * l))
        b2 = 2 * nu * (l - 1) * branch
    if not mu:
        raise DegeneratePlaneError("mu = 0 (c^2 = -1): the plane carries free motion")
    b1 = complex(c1) * (l - 1)
    sol = ParticularSolution(l, alpha_v, c_v, branch, complex(c1), mu, nu, b1, b2)
    muc = complex(mu)
    ts = _sample_times(sol)
    res = eres = pres = 0.0
    nu_printed = cmath.sqrt(-muc / (2 * (l + 1)))
    for t in ts:
        x, v, acc = sol.x(t), sol.xdot(t), sol.xddot(t)
        scale = max(1.0, abs(acc))
        res = max(res, abs(acc - muc * x ** (2 * l - 1)) / scale)
        pot = muc * x ** (2 * l) / (2 * l)
        escale = max(1.0, abs(v) ** 2)
        eres = max(eres, abs(v * v / 2 - pot) / escale)
        # the same check with b2 built from the printed nu relation
        b2p = 2 * nu_printed * (l - 1) * branch
        gp = complex(b1) + b2p * t
        if abs(gp) >= 0.1 and abs(cmath.phase(gp)) < math.pi - 0.1:
            xp = gp ** (-1.0 / (l - 1))
            vp = -b2p / (l - 1) * gp ** (-1.0 / (l - 1) - 1)
            pres = max(pres, abs(vp * vp / 2 - muc * xp ** (2 * l) / (2 * l)) / max(1.0, abs(vp) ** 2))
    sol.residual = res
    sol.energy_residual = eres
    sol.printed_relation_energy_residual = pres
    sol.discrepancies.append(
        f"nu relation: printed {PRINTED_NU_RELATION}; used mu = 4*nu^2*l "
        f"(energy residual with printed relation {pres:.3e})"
    )
    return sol


# -- variational equations ----------------------------------------------------------
def _hessian_on_line(V: Poly, c) -> list[Poly]:
    """Second derivatives ``(V11, V12, V22)`` restricted to ``q2 = c q1``."""
    one = GaussianRational(1)
    return [_on_line(V.diff(i).diff(j), one, c) for i, j in ((0, 0), (0, 1), (1, 1))]


def _mu_hats(l: int, alpha, c):
    """Closed forms of the constant block, ``-Hess V / x^(2l-2)``."""
    s = c * c + 1
    if l >= 2:
        f = alpha * s ** (l - 2)
        return (
            f * (c * c + (2 * l - 1)) * (-2 * l),
            f * c * (-4 * l * (l - 1)),
            f * (c * c * (2 * l - 1) + 1) * (-2 * l),
        )
    # l = 1: V = alpha (q1^2 + q2^2), Hessian 2 alpha I
    return (alpha * -2, alpha * 0, alpha * -2)


@dataclass
class VariationalSystem:
    """``xi' = A(t) xi`` with ``A = [[0, I], [M x(t)^(2l-2), 0]]``."""

    l: int
    alpha: object
    c: object
    mu_hat: tuple
    M: np.ndarray
    sol: ParticularSolution | None
    hessian_check: bool
    exact: bool

    @property
    def t0(self) -> complex | None:
        return None if self.sol is None else self.sol.t0

    def weight(self, t: float) -> complex:
        """``x(t)^(2l-2) = (b1 + b2 t)^(-2)``; 1 in the harmonic case."""
        if self.sol is None or self.l == 1:
            return 1.0 + 0j
        return self.sol.g(t) ** -2

    def A(self, t: float) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        out[0, 2] = out[1, 3] = 1.0
        out[2:, :2] = self.M * self.weight(t)
        return out


def variational_system(l: int, alpha=1, c=1, sol: ParticularSolution | None = None) -> VariationalSystem:
    """Build the VE along the plane solution and cross-check it against the
    exact Hessian of ``V_{2l,l}`` restricted to ``q2 = c q1``."""
    if l < 1:
        raise ValueError("l >= 1 required")
    if sol is None and l >= 2:
        sol = particular_solution(l, alpha, c)
    a = as_gr(alpha, strict=False) if not isinstance(alpha, complex) else None
    cc = as_gr(c, strict=False) if not isinstance(c, complex) else None
    exact = a is not None and cc is not None
    if exact:
        mh = _mu_hats(l, a, cc)
        V = exceptional_potential(2 * l, l, a)
        hess = _hessian_on_line(V, cc)
        q1 = Poly.var("q1", NATURAL)
        xpow = q1 ** (2 * l - 2)
        ok = all((h + xpow.scale(m)).is_zero() for h, m in zip(hess, mh))
    else:
        av, cv = complex(alpha), complex(c)
        mh = _mu_hats(l, av, cv)
        V = exceptional_potential(2 * l, l, 1)
        ok = True
        for x in (0.7 + 0.2j, -1.1 + 0.5j):
            z = (x, cv * x, 0j, 0j)
            for (i, j), m in zip(((0, 0), (0, 1), (1, 1)), mh):
                h = av * V.diff(i).diff(j)(*z)
                ok &= abs(h + m * x ** (2 * l - 2)) <= 1e-10 * max(1.0, abs(h))
    if not ok:
        raise ArithmeticError("closed-form variational block disagrees with the Hessian")
    M = np.array([[complex(mh[0]), complex(mh[1])], [complex(mh[1]), complex(mh[2])]])
    return VariationalSystem(l, a if exact else complex(alpha), cc if exact else complex(c), mh, M, sol, ok, exact)


@dataclass
class ExponentReport:
    eigenvalues: list
    b2_squared: object
    exponents: list[tuple]
    pair_sums: list
    repeated_in_pair: list[bool]
    integer_separated: list[bool]
    diagonalizable: bool
    indicator: str
    exact: bool

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [str(e) for e in self.eigenvalues],
            "b2_squared": str(self.b2_squared),
            "exponents": [[str(r) for r in pair] for pair in self.exponents],
            "pair_sums": [str(s) for s in self.pair_sums],
            "repeated_in_pair": self.repeated_in_pair,
            "integer_separated": self.integer_separated,
            "diagonalizable": self.diagonalizable,
            "indicator": self.indicator,
            "exact": self.exact,
        }


def _is_integer(x) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_real() and x.re.denominator == 1
    x = complex(x)
    return abs(x.imag) < 1e-9 and abs(x.real - round(x.real)) < 1e-9


def exponent_analysis(vs: VariationalSystem) -> ExponentReport:
    """Cauchy-Euler exponents ``r(r-1) b2^2 = lambda`` for each eigenvalue of the block.

    The indicator is ``"log-risk"`` when an exponent pair collapses or the
    block is not diagonalizable (the mechanisms producing logarithms), and
    ``"diagonal-compatible"`` otherwise.  Integer-separated pairs are only
    flagged.
    """
    if vs.sol is None:
        raise ValueError("exponent analysis needs the l >= 2 particular solution")
    m1, m2, m3 = vs.mu_hat
    exact = vs.exact and isinstance(vs.sol.b2, GaussianRational)
    if exact:
        b2sq = vs.sol.b2 * vs.sol.b2
        tr = m1 + m3
        disc = (m1 - m3) * (m1 - m3) + m2 * m2 * 4
        root = _sqrt(disc)
        if isinstance(root, GaussianRational):
            eig = [(tr + root) / 2, (tr - root) / 2]
        else:
            exact = False
    if not exact:
        b2sq = complex(vs.sol.b2) ** 2
        tr = complex(m1) + complex(m3)
        disc = (complex(m1) - complex(m3)) ** 2 + 4 * complex(m2) ** 2
        root = cmath.sqrt(disc)
        eig = [(tr + root) / 2, (tr - root) / 2]
    eig.sort(key=lambda e: (-complex(e).real, complex(e).imag))
    zero_disc = (not disc) if exact else abs(disc) < 1e-12
    scalar = (not m2 and m1 == m3) if exact else (abs(complex(m2)) < 1e-12 and abs(complex(m1) - complex(m3)) < 1e-12)
    diagonalizable = not zero_disc or scalar
    pairs, sums, rep, intsep = [], [], [], []
    for lam in eig:
        if exact:
            d = 1 + lam * 4 / b2sq
            sd = _sqrt(d)
        if exact and isinstance(sd, GaussianRational):
            r1, r2 = (1 + sd) / 2, (1 - sd) / 2
            pairs.append((r1, r2))
            sums.append(r1 + r2)
            rep.append(r1 == r2)
            intsep.append(_is_integer(r1 - r2))
        else:
            d = 1 + 4 * complex(lam) / complex(b2sq)
            sd = cmath.sqrt(d)
            r1, r2 = (1 + sd) / 2, (1 - sd) / 2
            pairs.append((r1, r2))
            sums.append(r1 + r2)
            rep.append(abs(r1 - r2) < 1e-12)
            intsep.append(_is_integer(r1 - r2))
            exact = False
    log_risk = any(rep) or not diagonalizable
    return ExponentReport(
        list(eig), b2sq, pairs, sums, rep, intsep, diagonalizable, "log-risk" if log_risk else "diagonal-compatible", exact
    )


@dataclass
class FundamentalPath:
    times: np.ndarray
    Phi: np.ndarray  # (n, 4, 4)
    symplecticity_drift: float


def integrate_variational(vs: VariationalSystem, t_span: tuple[float, float], dt: float, stride: int = 1) -> FundamentalPath:
    """RK4 fundamental matrix with ``Phi(t_start) = I`` and its symplecticity drift
    ``max_t ||Phi^T J2 Phi - J2||`` (Frobenius norm, plain transpose)."""
    t_start, t_stop = map(float, t_span)
    if not dt > 0 or t_stop <= t_start:
        raise ValueError("need dt > 0 and t_span[1] > t_span[0]")
    t0 = vs.t0
    if t0 is not None:
        # distance from t0 to the real segment
        tr = min(max(t0.real, t_start), t_stop)
        if abs(complex(tr, 0) - t0) < 0.1:
            raise ValueError(f"t_span passes within 0.1 of the singular time t0 = {t0}")
    n = int(round((t_stop - t_start) / dt))
    stride = max(1, int(stride))
    Phi = np.eye(4, dtype=complex)
    times = [t_start]
    path = [Phi.copy()]
    worst = 0.0
    t = t_start
    for step in range(n):
        k1 = vs.A(t) @ Phi
        k2 = vs.A(t + dt / 2) @ (Phi + dt / 2 * k1)
        k3 = vs.A(t + dt / 2) @ (Phi + dt / 2 * k2)
        k4 = vs.A(t + dt) @ (Phi + dt * k3)
        Phi = Phi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_start + (step + 1) * dt
        worst = max(worst, float(np.linalg.norm(Phi.T @ J2 @ Phi - J2)))
        if (step + 1) % stride == 0 or step + 1 == n:
            times.append(t)
            path.append(Phi.copy())
    return FundamentalPath(np.array(times), np.array(path), worst)
