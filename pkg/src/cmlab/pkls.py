"""The square of character lattices relating CM-types to Frobenius germs, and
a certificate that Ker(r) -> Ker(s) is surjective.

    Z[S]_0  --j-->  Z[G]^1
      |r              |s
    Z[P]_0  --i-->  Z[G/D]^d

S is the set of CM-types on the Galois closure, P the set of functions
pi: G/D -> {0..d} with pi + iota pi = d, d = |D|. Z[Y]_0 is Z[Y] modulo
{f : f = iota f, sum f = 0}; Z[Y]^d is {f : f + iota f = d c for some c}.
The quotients are handled through their lifts to Z[Y].
"""

from dataclasses import dataclass, field
from itertools import product as iproduct

from . import galois
from .cmspec import EnumerationBudgetExceeded, enum_budget
from .zlattice import IntLattice, IntMap, image, kernel, saturate, smith, solve


@dataclass
class Presented:
    """A lattice attached to a finite iota-set Y inside the free ambient Z[Y].

    kind "quotient": the lattice is Z[Y] / relations.
    kind "sublattice": the lattice is `lattice` itself."""
    name: str
    labels: list
    conj: list
    kind: str
    lattice: IntLattice
    relation_rows: list = field(default_factory=list)

    @property
    def ambient_dim(self):
        return len(self.labels)

    @property
    def rank(self):
        if self.kind == "quotient":
            return self.ambient_dim - self.lattice.rank
        return self.lattice.rank

    def coordinates(self):
        """Rows of a surjection Z[Y] -> Z^rank with kernel the relations."""
        if self.kind != "quotient":
            raise ValueError("coordinates are only defined on quotients")
        rows = self.relation_rows
        return saturate(IntLattice(self.ambient_dim, rows)).basis if rows else ()


def _relation_rows(conj):
    m = len(conj)
    rows = []
    for a in range(m):
        if a < conj[a]:
            r = [0] * m
            r[a], r[conj[a]] = 1, -1
            rows.append(r)
    rows.append([1] * m)
    return rows


def quotient(name, labels, conj):
    rows = _relation_rows(conj)
    R = kernel(IntMap(rows, None, len(labels)))
    return Presented(name, list(labels), list(conj), "quotient", R, rows)


def balanced(name, labels, conj, d):
    """Z[Y]^d as a sublattice of Z[Y]: project the kernel of
    (f, c) -> f + iota f - d c."""
    m = len(labels)
    rows = []
    for a in range(m):
        r = [0] * (m + 1)
        r[a] += 1
        r[conj[a]] += 1
        r[m] = -d
        rows.append(r)
    K = kernel(IntMap(rows, None, m + 1))
    L = IntLattice(m, [v[:m] for v in K.basis])
    return Presented(name, list(labels), list(conj), "sublattice", L)


@dataclass
class AppendixSquare:
    group: galois.GroupData
    D: galois.SubgroupData
    d: int
    types: list           # the CM-types, as 0/1 tuples on G
    germs: list           # the elements of P, as tuples on G/D
    cosets: list          # the left cosets tau D
    lattice_T: Presented  # Z[S]_0
    lattice_S: Presented  # Z[G]^1
    lattice_L: Presented  # Z[P]_0
    lattice_P: Presented  # Z[G/D]^d
    j: IntMap
    r: IntMap
    s: IntMap
    i: IntMap

    def commutes(self):
        return self.s @ self.j == self.i @ self.r


def _germ_set(cosets, conj, d):
    """All pi on the cosets with pi + iota pi = d."""
    free = [a for a in range(len(cosets)) if a < conj[a]]
    fixed = [a for a in range(len(cosets)) if a == conj[a]]
    if fixed and d % 2:
        return []
    out = []
    for vals in iproduct(range(d + 1), repeat=len(free)):
        pi = [0] * len(cosets)
        for a, v in zip(free, vals):
            pi[a] = v
            pi[conj[a]] = d - v
        for a in fixed:
            pi[a] = d // 2
        out.append(tuple(pi))
    return sorted(out)


def build_square(G, D, budget=None):
    budget = enum_budget() if budget is None else budget
    n = G.order
    if 2 ** (n // 2) > budget:
        raise EnumerationBudgetExceeded("%d CM-types exceed the budget" % 2 ** (n // 2))
    d = len(D)
    types = [phi.indicator for phi in galois.enumerate_cm_types(G, G.trivial())]
    tindex = {t: a for a, t in enumerate(types)}
    conj_types = [tindex[galois.act(G, G.iota, t)] for t in types]
    conj_G = [G.table[G.iota][x] for x in range(n)]

    cosets = D.left_cosets()
    cindex = {}
    for a, c in enumerate(cosets):
        for x in c:
            cindex[x] = a
    k = len(cosets)
    conj_cos = [cindex[G.table[G.iota][c[0]]] for c in cosets]
    count = 1
    for a in range(k):
        if a < conj_cos[a]:
            count *= d + 1
    if count > budget:
        raise EnumerationBudgetExceeded("%d germs exceed the budget" % count)
    germs = _germ_set(cosets, conj_cos, d)
    gindex = {g: a for a, g in enumerate(germs)}
    conj_germs = [gindex[tuple(g[conj_cos[a]] for a in range(k))] for g in germs]

    T = quotient("Z[S]_0", types, conj_types)
    S = balanced("Z[G]^1", list(range(n)), conj_G, 1)
    L = quotient("Z[P]_0", germs, conj_germs)
    P = balanced("Z[G/D]^d", cosets, conj_cos, d)

    def down(f):
        # f on G -> (tau D -> sum over sigma in D of f(tau sigma))
        return tuple(sum(f[G.table[c[0]][s]] for s in D.elements) for c in cosets)

    j = IntMap.from_columns(types, n)
    r = IntMap.from_columns([tuple(int(gindex[down(t)] == b) for b in range(len(germs)))
                             for t in types], len(germs))
    s = IntMap.from_columns([down(tuple(int(x == y) for x in range(n))) for y in range(n)], k)
    i = IntMap.from_columns(germs, k)
    sq = AppendixSquare(G, D, d, types, germs, cosets, T, S, L, P, j, r, s, i)
    _validate(sq)
    return sq


def _kills(M, R):
    return all(not any(M.apply(v)) for v in R.basis)


def _maps_into(M, rel_rows, R):
    """M sends the relations R into the relations cut out by rel_rows."""
    for v in R.basis:
        w = M.apply(v)
        if any(sum(a * b for a, b in zip(row, w)) for row in rel_rows):
            return False
    return True


def _validate(sq):
    # j and i are well defined on the quotients, r maps relations to relations
    if not _kills(sq.j, sq.lattice_T.lattice):
        raise AssertionError("j does not kill the relations of Z[S]_0")
    if not _kills(sq.i, sq.lattice_L.lattice):
        raise AssertionError("i does not kill the relations of Z[P]_0")
    if not _maps_into(sq.r, sq.lattice_L.relation_rows, sq.lattice_T.lattice):
        raise AssertionError("r does not respect the relations")
    # j and i land in the balanced sublattices
    for t in image(sq.j).basis:
        if t not in sq.lattice_S.lattice:
            raise AssertionError("j leaves Z[G]^1")
    for t in image(sq.i).basis:
        if t not in sq.lattice_P.lattice:
            raise AssertionError("i leaves Z[G/D]^d")
    if not sq.commutes():
        raise AssertionError("s j != i r")


def ker_r(sq):
    """Lift to Z[S] of the kernel of r on Z[S]_0 (contains the relations)."""
    rows = sq.lattice_L.relation_rows
    comp = [[sum(row[b] * sq.r.entries[b][a] for b in range(sq.r.rows))
             for a in range(sq.r.cols)] for row in rows]
    return kernel(IntMap(comp, None, sq.r.cols))


def ker_s(sq):
    S = sq.lattice_S.lattice
    if not S.rank:
        return S
    comp = sq.s @ S.matrix()
    K = kernel(comp)
    n = S.ambient_dim
    return IntLattice(n, [tuple(sum(c[a] * S.basis[a][t] for a in range(S.rank)) for t in range(n))
                          for c in K.basis])


def _generic_preimages(sq, Kr, Ks):
    if not Ks.rank:
        return []
    if not Kr.rank:
        return None
    JK = sq.j @ Kr.matrix()
    out = []
    for t in Ks.basis:
        c = solve(JK, t)
        if c is None:
            return None
        out.append(tuple(sum(c[a] * Kr.basis[a][x] for a in range(Kr.rank))
                         for x in range(Kr.ambient_dim)))
    return out


def structured_preimages(sq, Ks):
    """Preimages built from the types phi_(a,b) (equal to 1 at one point of
    each iota-pair family and 0 elsewhere on the 'upper' half) and the type
    phi' equal to 1 exactly on the 'lower' half.

    With iota in D, G = A.B.{1, iota} with A representing G/D and B
    representing D/<iota>; with iota not in D, G = A.{1, iota}.D with A
    representing G/<iota>D. In both cases an f with f + iota f = 0 and
    s(f) = 0 equals sum f(u) phi_u - (sum f(u)) phi' over upper points u."""
    G = sq.group
    t = G.table
    io = G.iota
    D = sq.D
    upper = []
    if io in D:
        B = [c[0] for c in G.generated([io]).left_cosets() if c[0] in D]
        for c in sq.cosets:
            a = c[0]
            upper.extend(t[a][b] for b in B)
    else:
        ID = G.generated(list(D.elements) + [io])
        for c in ID.left_cosets():
            a = c[0]
            upper.extend(t[a][s] for s in D.elements)
    n = G.order
    up = set(upper)
    if len(up) * 2 != n or any(t[io][x] in up for x in up):
        raise AssertionError("coset decomposition failed")
    tindex = {ty: k for k, ty in enumerate(sq.types)}
    phi_prime = tuple(int(x not in up) for x in range(n))
    basis = {}
    for u in upper:
        ty = tuple(int(x == u or (x not in up and t[io][x] != u)) for x in range(n))
        basis[u] = tindex[ty]
    kp = tindex[phi_prime]
    out = []
    for f in Ks.basis:
        x = [0] * len(sq.types)
        total = 0
        for u in upper:
            x[basis[u]] += f[u]
            total += f[u]
        x[kp] -= total
        out.append(tuple(x))
    return out


def _jsonable(v):
    return [list(r) for r in v]


def verify_pkls(G, D, budget=None):
    sq = build_square(G, D, budget)
    Kr = ker_r(sq)
    Ks = ker_s(sq)
    # well-definedness: j(Ker r) lies in Ker s
    if any(sq.j.apply(v) not in Ks for v in Kr.basis):
        raise AssertionError("j(Ker r) is not contained in Ker s")
    pre = _generic_preimages(sq, Kr, Ks)
    surjective = pre is not None
    if surjective:
        for x, t in zip(pre, Ks.basis):
            if x not in Kr or sq.j.apply(x) != t:
                raise AssertionError("generic certificate does not validate")
    structured = None
    try:
        cand = structured_preimages(sq, Ks)
        structured = all(x in Kr and sq.j.apply(x) == tv for x, tv in zip(cand, Ks.basis))
    except (KeyError, AssertionError):
        cand, structured = None, False
    diag = list(smith(sq.j @ Kr.matrix())[0]) if Kr.rank else []
    cert = {
        "group": G.name, "iota": G.iota, "D": list(D.elements), "d": sq.d,
        "case": "I" if G.iota in D else "II",
        "ranks": {"Z[S]_0": sq.lattice_T.rank, "Z[G]^1": sq.lattice_S.rank,
                  "Z[P]_0": sq.lattice_L.rank, "Z[G/D]^d": sq.lattice_P.rank,
                  "Ker r": Kr.rank - sq.lattice_T.lattice.rank, "Ker s": Ks.rank},
        "snf_diag_j_on_ker_r": diag,
        "ker_s_basis": _jsonable(Ks.basis),
        "preimages": _jsonable(pre) if pre is not None else None,
        "structured_preimages": _jsonable(cand) if cand is not None else None,
        "structured_valid": structured,
    }
    return {"surjective": surjective, "certificate": cert, "square": sq,
            "ker_r": Kr, "ker_s": Ks}
