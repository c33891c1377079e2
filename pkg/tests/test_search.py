import pytest
import sympy

from excpot.exactnum import I, GaussianRational
from excpot.mech import (
    bihomogeneous_system,
    catalog,
    catalog_item,
    exceptional_system,
    item6_family,
    poisson_bracket,
)
from excpot.parser import parse
from excpot.poly import BIHOM, Poly
from excpot.search import (
    AnsatzSpec,
    ExactMatrix,
    build_bracket_system,
    default_weight_cap,
    direct_search,
    enumerate_ansatz,
    exact_nullspace,
    in_span,
    scan,
)

x1, x2, y1, y2 = Poly.gens(BIHOM)


def mono(p: Poly):
    (e,) = p.terms
    return e


# -- exact nullspace ---------------------------------------------------------------
def test_nullspace_examples():
    eye = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert exact_nullspace(eye) == []
    assert len(exact_nullspace([[0] * 3] * 3)) == 3
    (v,) = exact_nullspace([[1, I, 0], [0, 0, 1]])
    # first nonzero entry normalized to 1; spans (-i, 1, 0)
    assert v == [1, I, 0]
    assert [c * (-I) for c in v] == [-I, 1, 0]


def test_nullspace_is_kernel(kernels):
    rows = [[1, 2, 3, I, 0], [0, 1, I, 1, 1], [1, 3, 3 + I, 1 + I, 1]]
    basis = exact_nullspace(rows, kernels)
    assert len(basis) == 3
    for v in basis:
        assert all(sum((GaussianRational(0) + a) * b for a, b in zip(r, v)) == 0 for r in rows)
        first = next(x for x in v if x)
        assert first == 1


def test_exact_matrix_roundtrip():
    dense = [[0, 1, 0], [GaussianRational("1/2", 1), 0, 0]]
    M = ExactMatrix.from_dense(dense)
    assert M.to_dense() == [[as_g(x) for x in r] for r in dense]
    assert M.nnz() == 2


def as_g(x):
    return GaussianRational(0) + x


# -- ansatz ------------------------------------------------------------------------
def test_enumerate_examples():
    got = set(enumerate_ansatz(2, 1, 4))
    for p in (y1 * x1, y2 * x2, y1 * x2, y2 * x1, x1**2, x1 * x2, x2**2):
        assert mono(p) in got
    assert enumerate_ansatz(3, 2, 0) == [(0, 0, 0, 0)]
    big = set(enumerate_ansatz(7, 4, 30))
    assert mono(y1**4 * x1) in big and mono(x1**3 * x2**12) in big


@pytest.mark.parametrize("k,m,W", [(2, 2, 8), (3, 2, 7), (7, 4, 30), (5, 3, 0)])
def test_enumerate_is_complete(k, m, W):
    got = enumerate_ansatz(k, m, W)
    assert len(got) == len(set(got))
    brute = {
        (a, b, c, d)
        for a in range(W + 1)
        for b in range(W + 1)
        for c in range(m + 1)
        for d in range(m + 1)
        if c + d <= m and 2 * (a + b) + k * (c + d) == W
    }
    assert set(got) == brute
    assert got == enumerate_ansatz(k, m, W)


def test_enumerate_errors():
    with pytest.raises(ValueError):
        enumerate_ansatz(0, 1, 1)
    with pytest.raises(ValueError):
        enumerate_ansatz(2, -1, 1)


# -- bracket system -------------------------------------------------------------------
def test_bracket_system_examples():
    sys = exceptional_system(5, 0, 1, "bihomogeneous")
    M, _ = build_bracket_system(sys, [mono(y1)])
    assert M.nnz() == 0
    sys = exceptional_system(4, 1, 1, "bihomogeneous")
    spec = AnsatzSpec.make(4, 2, 8)
    M, _ = build_bracket_system(sys, spec.monomials)
    kernel = [spec.poly(dict(enumerate(v)), BIHOM) for v in exact_nullspace(M)]
    assert in_span(sys.H, kernel)


def test_bracket_system_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        build_bracket_system(bihomogeneous_system(parse("x1^3 + x2^2", BIHOM)), [mono(y1)])


def _dense_oracle_kernel(sys, m, W):
    """Kernel by naive dense elimination in sympy, ansatz brackets built term by term."""
    monos = enumerate_ansatz(sys.k, m, W)
    brackets = [poisson_bracket(sys.H, Poly.monomial(e, 1, BIHOM)) for e in monos]
    rows = sorted({e for b in brackets for e in b.terms})
    to_sym = lambda c: sympy.Rational(c.re.numerator, c.re.denominator) + sympy.I * sympy.Rational(
        c.im.numerator, c.im.denominator
    )
    dense = sympy.Matrix(len(rows), len(monos), lambda i, j: to_sym(brackets[j].coeff(rows[i])))
    if not rows:
        dense = sympy.zeros(1, len(monos))
    return monos, dense.nullspace()


@pytest.mark.parametrize("V", ["x1*x2", "x1^2", "x2^2", "3*x1*x2 + (1+i)*x2^2"])
@pytest.mark.parametrize("m", [1, 2])
def test_completeness_against_dense_oracle(V, m):
    sys = bihomogeneous_system(parse(V, BIHOM))
    for W in range(0, m * 2 + default_weight_cap(2, m) + 1):
        rep = direct_search(sys, m, W, numeric_check=False)
        monos, oracle = _dense_oracle_kernel(sys, m, W)
        assert rep.kernel_dimension == len(oracle), (V, m, W)
        ours = sympy.Matrix(
            [[sympy.nsimplify(complex(F.coeff(e)).real) + sympy.I * sympy.nsimplify(complex(F.coeff(e)).imag)
              for e in monos] for F in rep.kernel_basis]
        ) if rep.kernel_basis else sympy.zeros(0, len(monos))
        if oracle:
            stacked = ours.col_join(sympy.Matrix.hstack(*oracle).T)
            assert stacked.rank() == len(oracle)


# -- direct search ---------------------------------------------------------------------
def test_direct_search_harmonic():
    rep = direct_search(exceptional_system(2, 1, 1, "bihomogeneous"), 1, 4)
    assert len(rep.novel_candidates) == 1
    (F,) = rep.novel_candidates
    J = y1 * x1 - y2 * x2
    assert F == J or F == -J
    assert rep.verified and rep.numeric_bracket_max < 1e-10


def test_direct_search_item6():
    sys = exceptional_system(7, 2, I, "bihomogeneous")
    rep = direct_search(sys, 4, 30)
    assert rep.kernel_dimension == 1 and len(rep.novel_candidates) == 1
    (F,) = rep.novel_candidates
    J = item6_family(16)
    lead = F.coeff(mono(y1**4 * x1))
    assert F.scale(16 / lead) == J
    for e, c in [((1, 0, 4, 0), 16), ((2, 6, 2, 0), 4), ((1, 7, 1, 1), -8), ((0, 8, 0, 2), 1), ((3, 12, 0, 0), -1)]:
        assert J.coeff(e) == c


def test_direct_search_natural_coordinates():
    rep = direct_search(exceptional_system(2, 1), 1, 4)
    (F,) = rep.novel_candidates
    assert F.vars.names[0] == "q1"
    assert poisson_bracket(exceptional_system(2, 1).H, F).is_zero()


def test_direct_search_negative_62():
    sys = exceptional_system(6, 2, 1, "bihomogeneous")
    for m in range(1, 5):
        for W in range(0, 4 * 6 + 1):
            assert direct_search(sys, m, W, numeric_check=False).novel_candidates == []
    const = direct_search(sys, 1, 0)
    assert const.kernel_dimension == 1 and const.trivial_subspace == [Poly.const(1, sys.vars)]


def test_known_integrals_filter():
    e = catalog(7, 2)
    rep = direct_search(e.system(), 4, 30, known=[e.integral()])
    assert rep.kernel_dimension == 1 and rep.novel_candidates == []
    assert len(rep.trivial_subspace) >= 1


# -- scan --------------------------------------------------------------------------------
@pytest.mark.parametrize("k", [2, 3, 5])
def test_scan_item1(k):
    reports = scan(exceptional_system(k, 0, 1, "bihomogeneous"), 1)
    first = next(r for r in reports if r.novel_candidates)
    assert (first.m, first.W) == (1, k) and first.novel_candidates == [y1]


@pytest.mark.parametrize("k", [3, 4, 5])
def test_scan_item4(k):
    reports = scan(exceptional_system(k, 1, 1, "bihomogeneous"), 2)
    hits = [(r.m, r.W) for r in reports for F in r.novel_candidates if in_span(catalog_item(4, k).J_bihom, [F])]
    assert hits == [(2, 2 * k)]


def test_scan_52_negative():
    reports = scan(exceptional_system(5, 2), 3)
    assert all(not r.novel_candidates for r in reports)
    assert [(r.m, r.W) for r in reports][:3] == [(1, 1), (1, 2), (1, 3)]
    assert max(r.W for r in reports if r.m == 3) == 3 * 5 + default_weight_cap(5, 3)


def test_scan_soundness_and_numeric_check():
    for r in scan(exceptional_system(4, 2, GaussianRational(1, 1)), 2):
        assert r.verified
        assert r.numeric_bracket_max < 1e-10
        H = exceptional_system(4, 2, GaussianRational(1, 1)).H
        assert all(poisson_bracket(H, F).is_zero() for F in r.kernel_basis)


def test_scan_errors_and_determinism():
    with pytest.raises(ValueError):
        scan(exceptional_system(3, 0), 0)
    a = [r.to_dict() for r in scan(exceptional_system(3, 1), 2)]
    b = [r.to_dict() for r in scan(exceptional_system(3, 1), 2)]
    assert a == b


@pytest.mark.parametrize("k,l", [(k, l) for k in range(1, 8) for l in range(k + 1) if catalog(k, l)])
def test_catalog_recovery_up_to_7(k, l):
    e = catalog(k, l)
    novel = [F for r in scan(e.system(), 4) for F in r.novel_candidates]
    assert any(in_span(e.J_bihom, [F]) for F in novel)
