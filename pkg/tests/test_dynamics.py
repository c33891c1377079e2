import math

import numpy as np
import pytest
from scipy.linalg import expm

from excpot.dynamics import (
    J2,
    DegeneratePlaneError,
    PhaseState,
    conservation_drift,
    exponent_analysis,
    integrate_hamilton,
    integrate_variational,
    invariant_plane_test,
    particular_solution,
    sample_initial_states,
    variational_system,
)
from excpot.exactnum import I, GaussianRational
from excpot.mech import (
    bihom_to_natural,
    catalog,
    exceptional_potential,
    exceptional_system,
    hamiltonian_vector_field,
    item6_family,
    natural_system,
)
from excpot.parser import parse
from excpot.poly import Poly


def test_phase_state_rejects_non_finite():
    with pytest.raises(ValueError):
        PhaseState((1, float("nan"), 0, 0))
    with pytest.raises(ValueError):
        PhaseState((1, 0, complex("inf"), 0))


def test_sample_states_seeded():
    a = sample_initial_states(5, seed=3)
    b = sample_initial_states(5, seed=3)
    assert [s.z for s in a] == [s.z for s in b]
    assert all(abs(z) <= 0.5 for s in a for z in s.z)


@pytest.mark.parametrize("dd", [False, True])
def test_harmonic_drift(dd):
    sys = exceptional_system(2, 1, GaussianRational("1/2"))
    z0 = (0.3, -0.2, 0.1, 0.4)
    traj = integrate_hamilton(sys, z0, 10.0, 1e-3, stride=100, dd=dd)
    assert conservation_drift(traj, [sys.H])[0] < 1e-10
    # exact solution: omega = 1
    q1 = traj.states[-1].z[0]
    assert abs(q1 - (0.3 * math.cos(10) + 0.1 * math.sin(10))) < 1e-10


def test_harmonic_halving_ratio():
    sys = exceptional_system(2, 1, GaussianRational("1/2"))
    z0 = (0.3, -0.2, 0.1, 0.4)
    d1 = conservation_drift(integrate_hamilton(sys, z0, 10.0, 1e-2, dd=True), [sys.H])[0]
    d2 = conservation_drift(integrate_hamilton(sys, z0, 10.0, 5e-3, dd=True), [sys.H])[0]
    assert d1 / d2 >= 8


def test_constant_drift_is_zero():
    sys = exceptional_system(3, 1)
    traj = integrate_hamilton(sys, (0.1, 0.2, 0.1, 0), 0.1, 1e-2)
    assert conservation_drift(traj, [Poly.const(5)]) == [0.0]


def test_catalog_conservation_and_impostor_separation():
    e = catalog(7, 2)
    sys = e.system("natural")
    impostor = bihom_to_natural(item6_family(6))
    z0 = sample_initial_states(1, seed=1)[0]
    traj = integrate_hamilton(sys, z0, 1.0, 1e-4, stride=50, dd=True)
    dH, dJ, dI = conservation_drift(traj, [sys.H, e.J_natural, impostor])
    assert dH < 1e-6 and dJ < 1e-6
    assert dI > 1e6 * max(dH, dJ)


def test_plane_stays_on_plane():
    for l in (1, 2, 3):
        sys = exceptional_system(2 * l, l)
        traj = integrate_hamilton(sys, (0.3 + 0.1j, 0, 0.2, 0), 1.0, 1e-3, stride=10)
        assert max(abs(s.z[1]) + abs(s.z[3]) for s in traj.states) < 1e-12


def test_blow_up_truncates():
    sys = exceptional_system(2, 1)
    traj = integrate_hamilton(natural_system(parse("-q1^3")), (1, 0, 1, 0), 10.0, 1e-2)
    assert traj.blown_up and traj.diagnostic and traj.steps < traj.requested_steps
    assert np.all(np.isfinite(traj.raw))
    with pytest.raises(ValueError):
        integrate_hamilton(sys, (0, 0, 0, 0), 1.0, 0.0)


def test_integrate_deterministic():
    sys = exceptional_system(7, 2)
    z0 = sample_initial_states(1)[0]
    a = integrate_hamilton(sys, z0, 0.05, 1e-3)
    b = integrate_hamilton(sys, z0, 0.05, 1e-3)
    assert np.array_equal(a.raw, b.raw)


# -- invariant planes ---------------------------------------------------------------
@pytest.mark.parametrize("k,l,c,expected", [(6, 3, 2, True), (5, 2, I, True), (5, 2, 2, False), (5, 2, -I, True)])
def test_plane_examples(k, l, c, expected):
    cert = invariant_plane_test(k, l, c)
    assert cert.invariant is expected and cert.exact and cert.agrees_with_criterion
    if expected:
        assert cert.residual.is_zero()


def test_plane_inexact_c():
    cert = invariant_plane_test(6, 3, 0.3 + 0.7j)
    assert cert.invariant and not cert.exact
    assert not invariant_plane_test(5, 2, 0.3 + 0.7j).invariant


def test_plane_axis_and_errors():
    assert invariant_plane_test(4, 2, None).invariant
    assert not invariant_plane_test(5, 2, None).invariant
    with pytest.raises(ValueError):
        invariant_plane_test(3, 4, 1)


def test_plane_edges_differ_from_criterion():
    # single-factor potentials: one isotropic plane is not invariant
    assert not invariant_plane_test(5, 0, I).invariant
    assert invariant_plane_test(5, 0, -I).invariant
    assert not invariant_plane_test(5, 5, -I).invariant
    assert invariant_plane_test(5, 5, I).invariant


# -- particular solution -------------------------------------------------------------
def test_particular_solution_l2():
    sol = particular_solution(2, 1, 1)
    assert sol.mu == -8 and sol.nu == I and sol.b2 == 2 * I
    assert sol.residual < 1e-9 and sol.energy_residual < 1e-9
    assert sol.printed_relation_energy_residual > 1e-3
    t = (1 - sol.b1) / complex(sol.b2)
    assert abs(sol.x(t) - 1) < 1e-12 and abs(sol.xddot(t) - complex(sol.mu)) < 1e-9


@pytest.mark.parametrize("l", [2, 3, 4, 5])
@pytest.mark.parametrize("c", [1, 2, GaussianRational(1, 1), 0.5 + 0.25j])
@pytest.mark.parametrize("branch", [1, -1])
def test_particular_solution_residuals(l, c, branch):
    sol = particular_solution(l, 1, c, branch)
    assert sol.residual < 1e-9 and sol.energy_residual < 1e-9


def test_particular_solution_errors():
    with pytest.raises(DegeneratePlaneError):
        particular_solution(2, 1, I)
    with pytest.raises(ValueError):
        particular_solution(1)
    with pytest.raises(ValueError):
        particular_solution(2, branch=0)


def test_particular_solution_is_a_flow_solution():
    """The plane solution with the constants above solves Hamilton's equations."""
    sol = particular_solution(2, 1, 2)
    sys = exceptional_system(4, 2)
    t = 0.3
    z = sol.state(t)
    field = [f(z) for f in hamiltonian_vector_field(sys)]
    accel = sol.xddot(t)
    assert abs(field[2] - accel) < 1e-9 * max(1, abs(accel))


# -- variational equation -------------------------------------------------------------
def test_mu_hats_l2():
    vs = variational_system(2, 1, 1)
    assert vs.mu_hat == (-16, -8, -16) and vs.hessian_check
    assert variational_system(3, 1, 0).mu_hat[1] == 0


@pytest.mark.parametrize("l", range(2, 7))
@pytest.mark.parametrize("c", [1, 2, I / 2, 1 + I])
def test_mu_hats_match_hessian(l, c):
    vs = variational_system(l, 1, c)
    assert vs.exact and vs.hessian_check


def test_hessian_oracle_q1q1():
    l, c, alpha = 3, GaussianRational(2), GaussianRational(3)
    vs = variational_system(l, alpha, c)
    V = exceptional_potential(2 * l, l, alpha)
    x = 0.7 - 0.2j
    h11 = V.diff(0).diff(0)(x, complex(c) * x, 0, 0)
    assert abs(h11 + complex(vs.mu_hat[0]) * x ** (2 * l - 2)) < 1e-9 * abs(h11)


def test_variational_block_shape():
    vs = variational_system(2, 1, 1)
    A = vs.A(1.0)
    assert np.array_equal(A[:2, 2:], np.eye(2)) and not A[:2, :2].any() and not A[2:, 2:].any()
    assert np.allclose(A[2:, :2], A[2:, :2].T)
    g = 1 + 2j * 1.0
    assert abs(vs.weight(1.0) - g**-2) < 1e-14


def test_exponents_l2():
    rep = exponent_analysis(variational_system(2, 1, 1))
    assert rep.exact and rep.b2_squared == -4
    assert rep.eigenvalues == [-8, -24]
    assert rep.exponents == [(2, -1), (3, -2)]
    assert rep.pair_sums == [1, 1] and rep.indicator == "diagonal-compatible"
    assert rep.integer_separated == [True, True]


def test_exponents_decoupled():
    rep = exponent_analysis(variational_system(3, 1, 0))
    assert all(abs(complex(s) - 1) < 1e-12 for s in rep.pair_sums)
    assert rep.diagonalizable


@pytest.mark.parametrize("l", [2, 3, 4])
@pytest.mark.parametrize("c", [1, 2, 0.3 + 0.4j])
def test_exponent_pairs_sum_to_one(l, c):
    rep = exponent_analysis(variational_system(l, 1, c))
    assert all(abs(complex(s) - 1) < 1e-12 for s in rep.pair_sums)


def test_symplecticity():
    path = integrate_variational(variational_system(2, 1, 1), (1.0, 2.0), 1e-4)
    assert path.symplecticity_drift < 1e-8
    assert np.array_equal(path.Phi[0], np.eye(4))
    end = path.Phi[-1]
    assert np.linalg.norm(end.T @ J2 @ end - J2) <= path.symplecticity_drift


def test_harmonic_variational_matches_expm():
    vs = variational_system(1, GaussianRational("1/2"), 1)
    path = integrate_variational(vs, (0.0, 2.0), 1e-3)
    assert np.linalg.norm(path.Phi[-1] - expm(2.0 * vs.A(0.0))) < 1e-8


def test_span_near_singularity_rejected():
    vs = variational_system(2, -1, 1)  # mu > 0, so b2 and t0 are real
    assert abs(vs.t0.imag) < 1e-12
    with pytest.raises(ValueError):
        integrate_variational(vs, (vs.t0.real - 1, vs.t0.real + 1), 1e-2)


@pytest.mark.parametrize("mode", [0, 1])
def test_cauchy_euler_asymptotics(mode):
    """A pure mode g^r v grows like |g|^r along the real time axis."""
    vs = variational_system(2, 1, 1)
    rep = exponent_analysis(vs)
    lam = complex(rep.eigenvalues[mode])
    r = complex(rep.exponents[mode][0])
    w, V = np.linalg.eig(vs.M)
    v = V[:, np.argmin(abs(w - lam))]
    b1, b2 = complex(vs.sol.b1), complex(vs.sol.b2)
    ts, T = 1.0, 60.0
    g0 = b1 + b2 * ts
    xi0 = np.concatenate([g0**r * v, r * b2 * g0 ** (r - 1) * v])
    path = integrate_variational(vs, (ts, T), 2e-3, stride=1000)
    xi = path.Phi[-1] @ xi0
    g = b1 + b2 * T
    ratio = math.log(np.linalg.norm(xi[:2])) / math.log(abs(g))
    assert abs(ratio - r.real) < 0.02 * abs(r.real)
    assert np.allclose(xi[:2], g**r * v, rtol=1e-6)
