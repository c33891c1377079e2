import cmath

import pytest
from hypothesis import given, settings

from excpot.exactnum import I, GaussianRational
from excpot.mech import TO_BIHOM, beta_of, exceptional_potential
from excpot.parser import parse
from excpot.poly import BIHOM, EVERY_WEIGHT, NATURAL, Poly, VarSetMismatch, p_eval, p_subst_linear, p_weight

from strategies import polys

q1, q2, p1, p2 = Poly.gens(NATURAL)
x1, x2, y1, y2 = Poly.gens(BIHOM)


def test_add_examples():
    f = q1**2 + q2 * I
    assert f + 0 == f
    assert (f + (-f)).is_zero() and len(f - f) == 0
    assert (q1**2 + q2 * I) + (q1**2 - q2 * I) == 2 * q1**2


def test_mul_examples():
    assert (q2 - q1 * I) * (q2 + q1 * I) == q1**2 + q2**2
    V = (q2 - q1 * I) ** 2 * (q2 + q1 * I) ** 5
    assert V.total_degree() == 7 and V.is_homogeneous() and len(V) == 8


def test_varset_mismatch():
    with pytest.raises(VarSetMismatch):
        q1 + x1
    with pytest.raises(VarSetMismatch):
        q1 * x1


def test_diff_examples():
    assert (q1**2 * q2).diff("q1") == 2 * q1 * q2
    assert (q1**5).diff("p1").is_zero()
    with pytest.raises((KeyError, ValueError)):
        q1.diff("z9")


@pytest.mark.parametrize("k,l", [(k, l) for k in range(1, 8) for l in range(0, k + 1)])
def test_diff_exceptional_factored(k, l):
    V = exceptional_potential(k, l)
    a, b = q2 - q1 * I, q2 + q1 * I
    rhs = I * (a ** max(l - 1, 0)) * (b ** max(k - l - 1, 0))
    inner = (k - l) * a - l * b
    if l == 0:
        expected = I * b ** (k - 1) * k
    elif l == k:
        expected = -I * a ** (k - 1) * k
    else:
        expected = rhs * inner
    assert V.diff("q1") == expected


def test_subst_identity_and_transform():
    f = q1**3 * p2 - q2 * I
    ident = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    assert p_subst_linear(f, ident, BIHOM) == f.relabel(BIHOM)
    T = p_subst_linear((p1**2 + p2**2) * GaussianRational(1, 0) / 2, TO_BIHOM, BIHOM)
    assert T == 2 * y1 * y2
    for k in range(1, 8):
        for l in range(k + 1):
            image = p_subst_linear(exceptional_potential(k, l, 3), TO_BIHOM, BIHOM)
            assert image == Poly.monomial((l, k - l, 0, 0), beta_of(k, l, 3), BIHOM)


def test_subst_singular():
    with pytest.raises(ValueError):
        p_subst_linear(q1, [[1, 0, 0, 0]] * 4, BIHOM)


def test_eval_examples():
    assert p_eval(q1**2, (2, 0, 0, 0)) == 4
    assert p_eval(Poly.zero(), (1, 2, 3, 4)) == 0
    assert p_eval(q1**2 + q2**2, (1, 1j, 0, 0)) == 0


def test_weight_examples():
    V = exceptional_potential(7, 2, 1, BIHOM)
    assert p_weight(V, (2, 2, 7, 7)) == 14
    H = 2 * y1 * y2 + V
    assert p_weight(H, (2, 2, 7, 7)) == 14
    assert p_weight(q1 + q2**2, (2, 2, 7, 7)) is None
    assert p_weight(Poly.zero(), (2, 2, 7, 7)) is EVERY_WEIGHT


def test_graded_lex_order():
    f = parse("q1 + q2^2 + p1*q1 + 3")
    assert [e for e, _ in f.items()] == [(1, 0, 1, 0), (0, 2, 0, 0), (1, 0, 0, 0), (0, 0, 0, 0)]


@given(polys(), polys(), polys())
@settings(max_examples=60)
def test_ring_laws(f, g, h):
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(polys(), polys())
@settings(max_examples=60)
def test_leibniz_rule(f, g):
    for v in range(4):
        assert (f * g).diff(v) == f.diff(v) * g + f * g.diff(v)


@given(polys(), polys())
@settings(max_examples=60)
def test_evaluation_is_a_homomorphism(f, g):
    z = (0.3 + 0.1j, -0.2j, 0.5, cmath.exp(0.4j) / 2)
    scale = 1 + abs(f(z)) * abs(g(z)) + abs(f(z)) + abs(g(z))
    assert abs((f * g)(z) - f(z) * g(z)) < 1e-9 * scale
    assert abs((f + g)(z) - f(z) - g(z)) < 1e-9 * scale
