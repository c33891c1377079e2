import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excpot import backend
from excpot.dynamics import _to_quad, pack_polys, sample_initial_states
from excpot.mech import catalog, exceptional_system, hamiltonian_vector_field
from excpot.search import build_bracket_system, _integral_row, enumerate_ansatz, exact_nullspace

compiled = pytest.mark.skipif("cython" not in backend.available_backends(), reason="compiled kernels not built")
PY = backend.get_backend("python")


def test_selection(monkeypatch):
    assert backend.get_backend("python").NAME == "python"
    monkeypatch.setenv("EXCPOT_PURE_PYTHON", "1")
    assert backend.get_backend().NAME == "python"
    monkeypatch.setenv("EXCPOT_PURE_PYTHON", "0")
    assert backend.get_backend().NAME == backend.available_backends()[0]
    with pytest.raises(ValueError):
        backend.get_backend("fortran")


def _system_rows(k, l, m, W):
    sys = exceptional_system(k, l, 1, "bihomogeneous")
    M, _ = build_bracket_system(sys, enumerate_ansatz(k, m, W))
    return [_integral_row(r) for r in M.rows], list(range(M.ncols)), M


@compiled
@pytest.mark.parametrize("k,l,m,W", [(7, 2, 4, 30), (5, 2, 3, 20), (4, 2, 2, 8)])
def test_gauss_jordan_identical(k, l, m, W):
    CY = backend.get_backend("cython")
    rows, cols, M = _system_rows(k, l, m, W)
    assert PY.gauss_jordan(rows, cols) == CY.gauss_jordan(rows, cols)
    assert exact_nullspace(M, PY) == exact_nullspace(M, CY)


@compiled
@given(st.lists(st.dictionaries(st.integers(0, 6), st.tuples(st.integers(-9, 9), st.integers(-9, 9)), max_size=5), max_size=6))
@settings(max_examples=100, deadline=None)
def test_gauss_jordan_random(rows):
    rows = [{c: v for c, v in r.items() if v != (0, 0)} for r in rows]
    CY = backend.get_backend("cython")
    assert PY.gauss_jordan(rows, list(range(7))) == CY.gauss_jordan(rows, list(range(7)))


@compiled
@pytest.mark.parametrize("dd", [False, True])
def test_rk4_bit_identical(dd):
    CY = backend.get_backend("cython")
    e = catalog(7, 2)
    exps, coefs, offs = pack_polys(hamiltonian_vector_field(e.system("natural")))
    z0 = _to_quad(sample_initial_states(1, seed=2)[0].z)
    a = PY.rk4_integrate(exps, coefs, offs, z0, 1e-3, 200, 7, dd)
    b = CY.rk4_integrate(exps, coefs, offs, z0, 1e-3, 200, 7, dd)
    assert a[1] == b[1] and np.array_equal(np.asarray(a[0]), np.asarray(b[0]))


@compiled
@pytest.mark.parametrize("dd", [False, True])
def test_poly_eval_bit_identical(dd):
    CY = backend.get_backend("cython")
    e = catalog(7, 2)
    exps, coefs, _ = pack_polys([e.J_natural])
    Z = np.array([_to_quad(s.z) for s in sample_initial_states(20, seed=5)])
    assert np.array_equal(np.asarray(PY.poly_eval(exps, coefs, Z, dd)), np.asarray(CY.poly_eval(exps, coefs, Z, dd)))


@compiled
def test_rk4_blow_up_identical():
    from excpot.mech import natural_system
    from excpot.parser import parse

    CY = backend.get_backend("cython")
    exps, coefs, offs = pack_polys(hamiltonian_vector_field(natural_system(parse("-q1^3"))))
    z0 = _to_quad((1, 0, 1, 0))
    a = PY.rk4_integrate(exps, coefs, offs, z0, 1e-2, 1000, 1, False)
    b = CY.rk4_integrate(exps, coefs, offs, z0, 1e-2, 1000, 1, False)
    assert a[1] == b[1] < 1000
    assert np.array_equal(np.asarray(a[0]), np.asarray(b[0]))
