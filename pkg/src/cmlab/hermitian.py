"""Riemann forms with an imaginary quadratic action, their hermitian forms,
signatures and determinant classes modulo norms.

Q = Q[beta] with beta^2 = -b, b > 0 rational. Elements of Q are pairs
(a, c) meaning a + c*beta. Bilinear forms are matrices acting on column
vectors: psi(x, y) = x^T Psi y. The hermitian form phi is conjugate-linear
in its first argument.
"""

from dataclasses import dataclass
from fractions import Fraction


class BadBeta(ValueError):
    pass


class NotQPolarized(ValueError):
    pass


class Degenerate(ValueError):
    pass


class ZeroValue(ValueError):
    pass


class SignMismatch(ValueError):
    pass


def _frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def squarefree_part(n):
    """Signed squarefree part of a nonzero integer."""
    if n == 0:
        raise ZeroValue("zero has no squarefree part")
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        if n % p == 0:
            out *= p
            n //= p
        p += 1
    return sign * out * n


def factor_primes(n):
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


class QuadField:
    """Q(sqrt(-b)) for a positive rational b."""

    __slots__ = ("b", "squarefree")

    def __init__(self, b):
        b = _frac(b)
        if b <= 0:
            raise ValueError("b must be positive")
        self.b = b
        self.squarefree = squarefree_part(b.numerator * b.denominator)

    def __repr__(self):
        return "QuadField(b=%s)" % self.b

    def __eq__(self, other):
        return isinstance(other, QuadField) and self.squarefree == other.squarefree

    def __hash__(self):
        return hash(self.squarefree)

    # arithmetic on pairs (a, c) = a + c*beta
    def mul(self, x, y):
        return (x[0] * y[0] - self.b * x[1] * y[1], x[0] * y[1] + x[1] * y[0])

    def conj(self, x):
        return (x[0], -x[1])

    def norm(self, x):
        return x[0] * x[0] + self.b * x[1] * x[1]

    def inv(self, x):
        n = self.norm(x)
        return (x[0] / n, -x[1] / n)


def _mat(M):
    return [[_frac(x) for x in row] for row in M]


def _mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _tr(A):
    return [list(r) for r in zip(*A)]


def _bil(P, x, y):
    return sum(x[i] * P[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if x[i] and y[j])


def _mv(A, v):
    return [sum(a * b for a, b in zip(row, v)) for row in A]


@dataclass
class RiemannPair:
    psi: list
    beta: list
    b: Fraction

    def __post_init__(self):
        self.psi = _mat(self.psi)
        self.beta = _mat(self.beta)
        self.b = _frac(self.b)
        n = len(self.psi)
        if any(len(r) != n for r in self.psi) or len(self.beta) != n:
            raise ValueError("psi and beta must be square of the same size")
        if n % 2:
            raise ValueError("dimension must be even")
        if any(self.psi[i][j] != -self.psi[j][i] for i in range(n) for j in range(n)):
            raise ValueError("psi is not alternating")

    @property
    def dim(self):
        return len(self.psi)

    @property
    def field(self):
        return QuadField(self.b)

    def check_beta(self):
        n = self.dim
        sq = _mm(self.beta, self.beta)
        if any(sq[i][j] != (-self.b if i == j else 0) for i in range(n) for j in range(n)):
            raise BadBeta("beta^2 != -b I")

    def is_q_polarized(self):
        # psi(beta x, y) = psi(x, conj(beta) y):  beta^T Psi = -Psi beta
        lhs = _mm(_tr(self.beta), self.psi)
        rhs = _mm(self.psi, self.beta)
        n = self.dim
        return all(lhs[i][j] == -rhs[i][j] for i in range(n) for j in range(n))


def pullback(pair, P):
    """T(P)(x, y) = P(beta x, beta y)."""
    B = pair.beta
    return _mm(_mm(_tr(B), P), B)


def split_riemann(pair):
    """psi = psi_plus + psi_minus with T(psi_pm) = +-b psi_pm."""
    pair.check_beta()
    b = pair.b
    T = pullback(pair, pair.psi)
    n = pair.dim
    plus = [[(pair.psi[i][j] + T[i][j] / b) / 2 for j in range(n)] for i in range(n)]
    minus = [[(pair.psi[i][j] - T[i][j] / b) / 2 for j in range(n)] for i in range(n)]
    return plus, minus


@dataclass
class HermitianForm:
    field: QuadField
    entries: list          # entries[i][j] = phi(e_i, e_j) as (a, c)
    basis: list = None     # the Q-basis of V the entries refer to

    @property
    def n(self):
        return len(self.entries)

    def is_hermitian(self):
        F = self.field
        n = self.n
        return all(self.entries[j][i] == F.conj(self.entries[i][j])
                   for i in range(n) for j in range(n))


def q_basis(pair):
    """Greedy Q-basis: standard vectors e with e, beta e independent of the
    previously chosen ones."""
    n = pair.dim
    chosen = []
    rows = []
    for k in range(n):
        e = [Fraction(int(i == k)) for i in range(n)]
        cand = rows + [e, _mv(pair.beta, e)]
        if _rank(cand) == len(cand):
            chosen.append(e)
            rows = cand
        if len(rows) == n:
            break
    return chosen


def _rank(rows):
    A = [list(r) for r in rows]
    r = 0
    ncol = len(A[0]) if A else 0
    for j in range(ncol):
        p = next((i for i in range(r, len(A)) if A[i][j]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(len(A)):
            if i != r and A[i][j]:
                f = A[i][j] / A[r][j]
                A[i] = [u - f * v for u, v in zip(A[i], A[r])]
        r += 1
    return r


def hermitian_from_riemann(pair):
    """phi(x, y) = psi(x, beta y) + beta psi(x, y) on a computed Q-basis."""
    pair.check_beta()
    if not pair.is_q_polarized():
        raise NotQPolarized("psi(beta x, y) != psi(x, conj(beta) y)")
    basis = q_basis(pair)
    B = pair.beta
    P = pair.psi
    ent = []
    for x in basis:
        row = []
        for y in basis:
            row.append((_bil(P, x, _mv(B, y)), _bil(P, x, y)))
        ent.append(row)
    h = HermitianForm(pair.field, ent, basis)
    if not roundtrip_ok(pair, h):
        raise AssertionError("phi - conj(phi) != 2 beta psi")
    return h


def roundtrip_ok(pair, h):
    """Check phi - conj(phi) = 2 beta psi on the full rational basis
    {e_i, beta e_i}, phi being extended sesquilinearly from h."""
    F = h.field
    B = pair.beta
    vecs = []
    for k, e in enumerate(h.basis):
        vecs.append((k, (Fraction(1), Fraction(0)), e))
        vecs.append((k, (Fraction(0), Fraction(1)), _mv(B, e)))
    for i, a, x in vecs:
        for j, c, y in vecs:
            val = F.mul(F.mul(F.conj(a), c), h.entries[i][j])
            # phi - conj(phi) = 2 val[1] beta
            if val[1] != _bil(pair.psi, x, y):
                return False
    return True


def riemann_from_hermitian(h):
    """Inverse direction: V = Q^n as Q^2n with coordinates (a_1, c_1, ...),
    beta acting by [[0, -b], [1, 0]] blockwise, psi = beta-coefficient of phi."""
    F = h.field
    n = h.n
    b = F.b
    beta = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for k in range(n):
        beta[2 * k][2 * k + 1] = -b
        beta[2 * k + 1][2 * k] = Fraction(1)
    units = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    psi = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for s in range(2):
            for j in range(n):
                for t in range(2):
                    val = F.mul(F.mul(F.conj(units[s]), units[t]), h.entries[i][j])
                    psi[2 * i + s][2 * j + t] = val[1]
    return RiemannPair(psi, beta, b)


def diagonalize(h):
    """Rational diagonal entries of phi after elementary changes of Q-basis
    with determinant 1; their product is the Gram determinant."""
    F = h.field
    A = [[(Fraction(e[0]), Fraction(e[1])) for e in row] for row in h.entries]
    n = len(A)
    diag = []
    zero = (Fraction(0), Fraction(0))
    for k in range(n):
        if A[k][k][0] == 0:
            j = next((j for j in range(k + 1, n) if A[j][j][0] != 0), None)
            if j is not None:
                _swap(A, k, j)
            else:
                j = next((j for j in range(k + 1, n) if A[k][j] != zero), None)
                if j is None:
                    raise Degenerate("hermitian form is degenerate")
                # e_k <- e_k + lam e_j, lam = 1 or beta
                lam = (Fraction(1), Fraction(0)) if A[k][j][0] != 0 else (Fraction(0), Fraction(1))
                _add(A, F, k, j, lam)
        p = A[k][k][0]
        for i in range(k + 1, n):
            if A[k][i] != zero:
                # e_i <- e_i - (phi(e_k, e_i)/phi(e_k, e_k)) e_k
                lam = (-A[k][i][0] / p, -A[k][i][1] / p)
                _add(A, F, i, k, lam)
        diag.append(p)
    return diag


def _swap(A, i, j):
    A[i], A[j] = A[j], A[i]
    for row in A:
        row[i], row[j] = row[j], row[i]


def _add(A, F, i, j, lam):
    # replace e_i by e_i + lam e_j; phi(x, y) conj-linear in x
    n = len(A)
    lc = F.conj(lam)
    newrow = [(A[i][t][0] + F.mul(lc, A[j][t])[0], A[i][t][1] + F.mul(lc, A[j][t])[1])
              for t in range(n)]
    A[i] = newrow
    for row in A:
        v = F.mul(row[j], lam)
        row[i] = (row[i][0] + v[0], row[i][1] + v[1])


def signature(h):
    d = diagonalize(h)
    return sum(1 for x in d if x > 0), sum(1 for x in d if x < 0)


def gram_determinant(h):
    """det of the Gram matrix over Q by Gaussian elimination over Q[beta]."""
    F = h.field
    A = [[(Fraction(e[0]), Fraction(e[1])) for e in row] for row in h.entries]
    n = len(A)
    det = (Fraction(1), Fraction(0))
    for k in range(n):
        p = next((i for i in range(k, n) if A[i][k] != (0, 0)), None)
        if p is None:
            return (Fraction(0), Fraction(0))
        if p != k:
            A[k], A[p] = A[p], A[k]
            det = (-det[0], -det[1])
        det = F.mul(det, A[k][k])
        inv = F.inv(A[k][k])
        for i in range(k + 1, n):
            f = F.mul(A[i][k], inv)
            A[i] = [(a[0] - F.mul(f, c)[0], a[1] - F.mul(f, c)[1]) for a, c in zip(A[i], A[k])]
    return det


class NormClass:
    """A nonzero rational modulo norms from Q."""

    __slots__ = ("field", "representative")

    def __init__(self, field, representative):
        r = _frac(representative)
        if r == 0:
            raise ZeroValue("zero has no norm class")
        self.field = field
        self.representative = r

    def __eq__(self, other):
        return (isinstance(other, NormClass) and self.field == other.field
                and norm_class_eq(self.representative, other.representative, self.field))

    def __hash__(self):
        return hash(self.field)

    def __repr__(self):
        return "NormClass(%s mod norms from %r)" % (self.representative, self.field)

    def is_trivial(self):
        return is_norm(self.representative, self.field)


def det_class(h):
    d = diagonalize(h)
    prod = Fraction(1)
    for x in d:
        prod *= x
    return NormClass(h.field, prod)


# --- Hilbert symbols -------------------------------------------------------

def _legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _split(a, p):
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a, b, p):
    """(a, b)_p for nonzero integers a, b; p a prime or 0 for the real place."""
    if p == 0:
        return -1 if a < 0 and b < 0 else 1
    al, u = _split(a, p)
    be, v = _split(b, p)
    if p == 2:
        e = lambda x: ((x - 1) // 2) % 2
        w = lambda x: ((x * x - 1) // 8) % 2
        s = e(u) * e(v) + al * w(v) + be * w(u)
        return -1 if s % 2 else 1
    s = 1
    if (al * be) % 2 and p % 4 == 3:
        s = -s
    if be % 2:
        s *= _legendre(u, p)
    if al % 2:
        s *= _legendre(v, p)
    return s


def _as_field(field):
    return field if isinstance(field, QuadField) else QuadField(field)


def is_norm(a, field):
    """Is a in Nm(Q^x)? Decided by the Hilbert symbols (a, -b)_v at every place
    where they can be nontrivial."""
    field = _as_field(field)
    a = _frac(a)
    if a == 0:
        raise ZeroValue("zero is not in Q^x")
    ai = a.numerator * a.denominator
    m = -field.squarefree
    places = [0, 2] + factor_primes(ai) + factor_primes(m)
    return all(hilbert_symbol(ai, m, p) == 1 for p in sorted(set(places)))


def is_norm_search(a, field):
    """Independent check: search for X^2 + b0 Y^2 = a0 Z^2 inside the box
    guaranteed by Holzer's theorem (after making coefficients coprime)."""
    from math import gcd, isqrt
    field = _as_field(field)
    a = _frac(a)
    if a == 0:
        raise ZeroValue("zero is not in Q^x")
    a0 = squarefree_part(a.numerator * a.denominator)
    b0 = field.squarefree
    if a0 < 0:
        return False
    g = gcd(a0, b0)
    ap, bp = a0 // g, b0 // g
    # g X'^2 + bp Y^2 = ap Z^2 with |Y| <= sqrt(g ap), |Z| <= sqrt(g bp)
    for z in range(1, isqrt(g * bp) + 1):
        for y in range(0, isqrt(g * ap) + 1):
            r = ap * z * z - bp * y * y
            if r < 0:
                break
            if r % g == 0:
                q = r // g
                if isqrt(q) ** 2 == q:
                    return True
    return False


def norm_class_eq(a1, a2, field):
    a1, a2 = _frac(a1), _frac(a2)
    if a1 == 0 or a2 == 0:
        raise ZeroValue("zero is not in Q^x")
    return is_norm(a1 / a2, field)


def adjust_det(a, n, field=None):
    """Positive integer c with a*c = (-1)^((n+1)/2) modulo norms."""
    if isinstance(a, NormClass):
        field = a.field
        a = a.representative
    field = _as_field(field)
    a = _frac(a)
    if a == 0:
        raise ZeroValue("zero has no norm class")
    if n % 2 == 0 or n < 1:
        raise ValueError("n must be a positive odd integer")
    t = -1 if ((n + 1) // 2) % 2 else 1
    ta = t * a
    if ta <= 0:
        raise SignMismatch("(-1)^((n+1)/2) a must be positive")
    c = ta.numerator * ta.denominator
    if not norm_class_eq(a * c, t, field):
        raise AssertionError("adjusted determinant is not in the target class")
    return c


def markman_gate(dim, d):
    """Gate for the algebraicity of Weil classes: fourfold, determinant 1."""
    return dim == 4 and d.is_trivial()
