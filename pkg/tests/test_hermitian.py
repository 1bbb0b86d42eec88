import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cmlab import hermitian
from cmlab.hermitian import (BadBeta, Degenerate, HermitianForm, NormClass, NotQPolarized,
                             QuadField, RiemannPair, SignMismatch, ZeroValue, adjust_det,
                             det_class, factor_primes, gram_determinant, hermitian_from_riemann,
                             hilbert_symbol, is_norm, is_norm_search, markman_gate,
                             norm_class_eq, riemann_from_hermitian, roundtrip_ok, signature,
                             split_riemann, squarefree_part)


def rand_frac(rng, k=5):
    return Fraction(rng.randint(-k, k), rng.randint(1, 3))


def random_hermitian(rng, F, n, diag=None):
    ent = [[None] * n for _ in range(n)]
    for i in range(n):
        if diag is not None:
            ent[i][i] = (Fraction(diag[i]), Fraction(0))
        else:
            ent[i][i] = (rand_frac(rng) or Fraction(1), Fraction(0))
        for j in range(i + 1, n):
            z = (rand_frac(rng), rand_frac(rng)) if diag is None else (Fraction(0), Fraction(0))
            ent[i][j] = z
            ent[j][i] = F.conj(z)
    return HermitianForm(F, ent)


def random_gl(rng, n):
    while True:
        P = sympy.Matrix(n, n, lambda i, j: rng.randint(-2, 2))
        if P.det() != 0:
            return P


def transform(pair, P):
    """Change of Q-basis x = P x'."""
    Psi = sympy.Matrix(pair.psi)
    B = sympy.Matrix(pair.beta)
    psi = P.T * Psi * P
    beta = P.inv() * B * P
    conv = lambda M: [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1])) for x in row]
                      for row in M.tolist()]
    return RiemannPair(conv(psi), conv(beta), pair.b)


def descartes_signature(pair):
    """Signature of the real form psi(x, beta y), from sign changes of the
    characteristic polynomial (all roots are real)."""
    S = sympy.Matrix(pair.psi) * sympy.Matrix(pair.beta)
    assert S == S.T
    lam = sympy.Symbol("lam")
    coeffs = [c for c in sympy.Poly(S.charpoly(lam).as_expr(), lam).all_coeffs()]
    nz = [c for c in coeffs if c != 0]
    pos = sum(1 for a, b in zip(nz, nz[1:]) if a * b < 0)
    negc = [c * (-1) ** k for k, c in enumerate(reversed(coeffs))][::-1]
    nz = [c for c in negc if c != 0]
    neg = sum(1 for a, b in zip(nz, nz[1:]) if a * b < 0)
    return pos, neg


def random_pair(seed, n=None, b=None, diag=None):
    rng = random.Random(seed)
    b = b or rng.choice([1, 2, 3, 5, 7, Fraction(3, 4), 15])
    F = QuadField(b)
    n = n or rng.randint(1, 3)
    h = random_hermitian(rng, F, n, diag)
    pair = riemann_from_hermitian(h)
    return h, transform(pair, random_gl(rng, 2 * n)), rng


@pytest.mark.parametrize("seed", range(100))
def test_roundtrip_on_random_polarized_pairs(seed):
    h0, pair, _ = random_pair(seed)
    pair.check_beta()
    assert pair.is_q_polarized()
    h = hermitian_from_riemann(pair)
    assert h.is_hermitian()
    assert roundtrip_ok(pair, h)
    plus, minus = split_riemann(pair)
    assert all(x == 0 for row in minus for x in row)
    if gram_determinant(h0)[0] != 0:
        assert signature(h) == signature(h0)
        p, q = descartes_signature(pair)
        assert (2 * signature(h)[0], 2 * signature(h)[1]) == (p, q)
        assert det_class(h) == det_class(h0)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("seed", range(5))
def test_weil_type_pairs(m, seed):
    rng = random.Random(seed)
    diag = [rng.randint(1, 6) for _ in range(m)] + [-rng.randint(1, 6) for _ in range(m)]
    h0, pair, _ = random_pair(seed, n=2 * m, diag=diag)
    h = hermitian_from_riemann(pair)
    assert signature(h) == (m, m)
    det = gram_determinant(h)
    assert det[1] == 0 and (-1) ** m * det[0] > 0


def test_gram_determinant_matches_diagonal_product():
    h0, pair, _ = random_pair(7, n=3)
    h = hermitian_from_riemann(pair)
    prod = Fraction(1)
    for x in hermitian.diagonalize(h):
        prod *= x
    assert gram_determinant(h) == (prod, 0)


def test_errors():
    with pytest.raises(BadBeta):
        RiemannPair([[0, 1], [-1, 0]], [[1, 0], [0, 1]], 1).check_beta()
    # psi pairs e1 with e3 only, so psi(beta e1, e4) = 0 but psi(e1, beta e4) = -1
    psi = [[0] * 4 for _ in range(4)]
    psi[0][2], psi[2][0] = 1, -1
    weird = RiemannPair(psi, [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], 1)
    assert not weird.is_q_polarized()
    with pytest.raises(NotQPolarized):
        hermitian_from_riemann(weird)
    with pytest.raises(ValueError):
        RiemannPair([[0, 1], [1, 0]], [[0, -1], [1, 0]], 1)
    with pytest.raises(ValueError):
        RiemannPair([[0]], [[0]], 1)
    with pytest.raises(ZeroValue):
        NormClass(QuadField(1), 0)
    with pytest.raises(SignMismatch):
        adjust_det(5, 1, 1)
    with pytest.raises(ValueError):
        adjust_det(5, 2, 1)
    z = HermitianForm(QuadField(1), [[(Fraction(0), Fraction(0))]])
    with pytest.raises(Degenerate):
        signature(z)


def test_squarefree_and_factor():
    assert squarefree_part(72) == 2 and squarefree_part(-75) == -3
    assert factor_primes(360) == [2, 3, 5]
    assert QuadField(Fraction(3, 4)).squarefree == 3


@given(st.integers(-60, 60).filter(bool), st.integers(-60, 60).filter(bool))
def test_hilbert_product_formula(a, b):
    places = [0, 2] + factor_primes(abs(a)) + factor_primes(abs(b))
    prod = 1
    for p in sorted(set(places)):
        prod *= hilbert_symbol(a, b, p)
    assert prod == 1


@pytest.mark.parametrize("a,b,p,val", [(-1, -1, 0, -1), (-1, -1, 2, -1), (2, 3, 3, -1),
                                       (3, 5, 5, -1), (5, 5, 2, 1), (-1, 3, 3, -1), (7, 7, 7, -1)])
def test_hilbert_symbol_values(a, b, p, val):
    assert hilbert_symbol(a, b, p) == val


def test_is_norm_agrees_with_search_on_box():
    for b in range(1, 21):
        F = QuadField(b)
        for num in range(-50, 51):
            if not num:
                continue
            for den in range(1, 51):
                a = Fraction(num, den)
                if a.denominator != den:
                    continue
                assert is_norm(a, F) == is_norm_search(a, F), (a, b)


@pytest.mark.parametrize("a,b,expected", [(2, 1, True), (3, 1, False), (5, 1, True), (3, 2, True),
                                          (7, 3, True), (2, 3, False), (-1, 1, False),
                                          (Fraction(1, 2), 1, True)])
def test_known_norms(a, b, expected):
    assert is_norm(a, b) is expected


@given(st.integers(-40, 40).filter(bool), st.integers(1, 30), st.sampled_from([1, 3, 5, 7]),
       st.integers(1, 15))
def test_adjust_det_lands_in_target_class(num, den, n, b):
    a = Fraction(num, den)
    t = (-1) ** ((n + 1) // 2)
    if t * a <= 0:
        with pytest.raises(SignMismatch):
            adjust_det(a, n, b)
        return
    c = adjust_det(a, n, b)
    assert isinstance(c, int) and c > 0
    assert norm_class_eq(a * c, t, b)
    assert adjust_det(NormClass(QuadField(b), a), n) == c


def test_markman_gate():
    F = QuadField(3)
    assert markman_gate(4, NormClass(F, 1))
    assert markman_gate(4, NormClass(F, 4))
    assert not markman_gate(4, NormClass(F, 2))
    assert not markman_gate(6, NormClass(F, 1))


def test_adjust_det_frozen():
    assert adjust_det(2, 3, 1) == 2


@given(st.integers(-30, 30).filter(bool), st.integers(-30, 30).filter(bool), st.integers(1, 20))
def test_class_equality_is_multiplicative(a1, a2, b):
    assert norm_class_eq(a1 * a2, 1, b) == norm_class_eq(a1, a2, b)
