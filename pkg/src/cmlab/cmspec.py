"""Cocharacter lattices of the tori attached to a CM abelian variety.

A variety is a formal product of factors (H, phi, multiplicity) over one
group G, each factor being a simple CM abelian variety with CM by K^H and
type phi. Every lattice lives in the block ambient Z^(G x factors): block i
holds functions on G for factor i.

The centre of End^0 is read off from the CM-types themselves: two slots
(i, x) and (j, y) are identified when the right translates x -> mu_i(. x)
and mu_j(. y) agree. Within one block this is the right coset of the
centre field; across blocks it only happens for isogenous factors. The same
construction on the Frobenius cocharacters gives the centre of the
endomorphism algebra of the reduction, where isogenies between reductions
of different factors are common and are handled rather than rejected.
"""

import os
from dataclasses import dataclass, field
from math import comb

from . import galois
from .galois import MixedGroups, act, frobenius_cocharacter, right_translate
from .zlattice import IntLattice, IntMap, contains, join, kernel, meet, saturate


class InvalidSpec(ValueError):
    pass


class IsogenousReductionFactors(ValueError):
    pass


class EnumerationBudgetExceeded(RuntimeError):
    pass


def enum_budget():
    return int(os.environ.get("CMLAB_ENUM_BUDGET", str(10 ** 7)))


@dataclass(frozen=True)
class Factor:
    H: galois.SubgroupData
    phi: galois.CMType
    multiplicity: int = 1

    @property
    def dim(self):
        return self.H.index() // 2 * self.multiplicity


class VarietySpec:
    """Product of pairwise non-isogenous simple CM factors over one group."""

    def __init__(self, group, factors):
        factors = tuple(f if isinstance(f, Factor) else Factor(*f) for f in factors)
        if not factors:
            raise InvalidSpec("a variety needs at least one factor")
        for f in factors:
            if f.H.parent != group or f.phi.group != group:
                raise MixedGroups("factor lives on a different group")
            if f.phi.H != f.H:
                raise InvalidSpec("CM-type is attached to a different subgroup than its factor")
            if f.multiplicity < 1:
                raise InvalidSpec("multiplicities must be positive")
        for i in range(len(factors)):
            for j in range(i):
                if _isogenous(group, factors[i].phi.indicator, factors[j].phi.indicator):
                    raise InvalidSpec("factors %d and %d are isogenous; list each isogeny "
                                      "class once and use the multiplicity" % (j, i))
        self.group = group
        self.factors = factors

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    def __repr__(self):
        return "VarietySpec(%s, %r)" % (self.group.name, [(f.phi, f.multiplicity) for f in self.factors])

    def blocks(self):
        return [f.phi.indicator for f in self.factors]

    def ambient_dim(self):
        return self.group.order * len(self.factors)


def _isogenous(G, mu1, mu2):
    # CM varieties (K^H, phi) and (K^H', phi') are isogenous when the lifted
    # types differ by a right translation (an isomorphism of the fields)
    return any(right_translate(G, g, mu1) == mu2 for g in G.elements())


def single(G, H, phi, multiplicity=1):
    return VarietySpec(G, [Factor(H, phi, multiplicity)])


def product(specs):
    G = specs[0].group
    if any(s.group != G for s in specs):
        raise MixedGroups("specs over different groups")
    return VarietySpec(G, [f for s in specs for f in s.factors])


def all_types_spec(G):
    """One factor for every isogeny class of simple CM varieties whose type
    is induced from a CM-type on K (each on its own primitive field)."""
    factors = []
    seen = set()
    for phi in galois.enumerate_cm_types(G, G.trivial()):
        mu = phi.indicator
        if mu in seen:
            continue
        for g in G.elements():
            seen.add(right_translate(G, g, mu))
        H = galois.right_inv(G, mu)
        factors.append(Factor(H, galois.CMType(H, mu), 1))
    return VarietySpec(G, factors)


# ---------------------------------------------------------------------------
# block vectors

def _block_act(G, g, blocks):
    out = ()
    for b in blocks:
        out += act(G, g, b)
    return out


def _orbit_lattice(G, blocks):
    n = G.order * len(blocks)
    return saturate(IntLattice(n, [_block_act(G, g, blocks) for g in G.elements()]))


def _iota_index(G):
    t = G.table
    return [t[G.iota][x] for x in range(G.order)]


def minus_lattice(G, k):
    """{y : iota.y = -y} in each of k blocks."""
    n = G.order
    io = _iota_index(G)
    vecs = []
    for i in range(k):
        for x in range(n):
            if x < io[x]:
                v = [0] * (n * k)
                v[i * n + x] = 1
                v[i * n + io[x]] = -1
                vecs.append(v)
    return IntLattice(n * k, vecs)


def minus_part(G, L, k):
    """L intersected with the minus lattice, by solving (1 + iota) y = 0 on
    the coordinates of L."""
    n = G.order
    io = _iota_index(G)
    if not L.rank:
        return L
    cols = []
    for y in L.basis:
        cols.append(tuple(y[i * n + x] + y[i * n + io[x]] for i in range(k) for x in range(n)))
    K = kernel(IntMap.from_columns(cols, n * k))
    vecs = [tuple(sum(c[a] * L.basis[a][t] for a in range(L.rank)) for t in range(n * k))
            for c in K.basis]
    return IntLattice(n * k, vecs)


def slot_classes(G, blocks):
    """Partition of the slots (i, x) by the right translate of block i at x."""
    cls = {}
    label = []
    for i, f in enumerate(blocks):
        for x in G.elements():
            key = right_translate(G, x, f)
            label.append(cls.setdefault(key, len(cls)))
    return label, len(cls)


def centre_minus_lattice(G, blocks):
    """Functions constant on slot classes with iota.y = -y: the cocharacters
    of the norm-one torus of the centre."""
    n = G.order
    k = len(blocks)
    label, m = slot_classes(G, blocks)
    io = _iota_index(G)
    members = [[] for _ in range(m)]
    partner = [None] * m
    for i in range(k):
        for x in range(n):
            c = label[i * n + x]
            members[c].append(i * n + x)
            partner[c] = label[i * n + io[x]]
    vecs = []
    for c in range(m):
        p = partner[c]
        if c < p:
            v = [0] * (n * k)
            for s in members[c]:
                v[s] = 1
            for s in members[p]:
                v[s] = -1
            vecs.append(v)
    return IntLattice(n * k, vecs)


def weight_vector(G, k):
    return tuple([1] * (G.order * k))


@dataclass
class TorusLatticeSet:
    ambient: int
    Y_MT: IntLattice
    Y_Hg: IntLattice
    Y_S: IntLattice
    Y_L: IntLattice
    D: object = None
    nu_blocks: list = None
    Y_P: IntLattice = None
    Y_S0: IntLattice = None
    Y_L0: IntLattice = None
    H0_blocks: list = None
    isogenous_reductions: list = field(default_factory=list)

    def ranks(self):
        out = {}
        for name in ("Y_MT", "Y_Hg", "Y_S", "Y_L", "Y_P", "Y_S0", "Y_L0"):
            L = getattr(self, name)
            if L is not None:
                out[name[2:]] = L.rank
        return out


def torus_lattices(spec, D=None, strict=False):
    """Y(MT), Y(Hg), Y(S), Y(L); with a decomposition group D also Y(P),
    Y(S0), Y(L0) of the reduction. With strict=True, isogenies between the
    reductions of distinct factors raise IsogenousReductionFactors."""
    G = spec.group
    k = len(spec.factors)
    n = G.order * k
    mus = spec.blocks()
    nvec = weight_vector(G, k)
    Y_MT = _orbit_lattice(G, mus)
    Y_Hg = saturate(minus_part(G, Y_MT, k))
    Y_S = centre_minus_lattice(G, mus)
    Y_L = saturate(join(Y_S, IntLattice(n, [nvec])))
    out = TorusLatticeSet(n, Y_MT, Y_Hg, Y_S, Y_L)
    if D is None:
        return out
    if D.parent != G:
        raise MixedGroups("decomposition group lives on a different group")
    nus = [frobenius_cocharacter(G, mu, D) for mu in mus]
    iso = []
    for i in range(k):
        for j in range(i):
            if _isogenous(G, nus[i], nus[j]):
                iso.append((j, i))
    if iso and strict:
        raise IsogenousReductionFactors("reductions of factors %r are isogenous" % (iso,))
    out.D = D
    out.nu_blocks = nus
    out.Y_P = _orbit_lattice(G, nus)
    out.Y_S0 = centre_minus_lattice(G, nus)
    out.Y_L0 = saturate(join(out.Y_S0, IntLattice(n, [nvec])))
    out.H0_blocks = [galois.right_inv(G, nu) for nu in nus]
    out.isogenous_reductions = iso
    return out


def is_neat_char0(spec, lattices=None):
    T = lattices or torus_lattices(spec)
    return T.Y_Hg == T.Y_S


def is_neat_charp(spec, D, lattices=None):
    T = lattices or torus_lattices(spec, D)
    return T.Y_P == T.Y_L0


def star_condition(spec, D, lattices=None):
    T = lattices or torus_lattices(spec, D)
    rhs = saturate(meet(T.Y_L0, T.Y_MT))
    if not contains(rhs, T.Y_P):
        raise AssertionError("Frobenius torus escapes L(A0) meet MT(A)")
    return {"holds": rhs == T.Y_P,
            "ranks": {"P": T.Y_P.rank, "L0_meet_MT": rhs.rank,
                      "L0": T.Y_L0.rank, "MT": T.Y_MT.rank}}


def kind_lattice(T, kind):
    return {"MT": T.Y_MT, "L": T.Y_L, "P": T.Y_P, "L0": T.Y_L0,
            "Hg": T.Y_Hg, "S": T.Y_S}[kind]


def _pool(spec, s):
    """Eigencharacters of H^1(A^s): (block, coset representative, copies)."""
    out = []
    for i, f in enumerate(spec.factors):
        for c in f.H.left_cosets():
            out.append((i, c[0], f.multiplicity * s))
    return out


def _count_submultisets(copies, size):
    ways = [1] + [0] * size
    for c in copies:
        new = [0] * (size + 1)
        for t in range(size + 1):
            if ways[t]:
                for a in range(min(c, size - t) + 1):
                    new[t + a] += ways[t]
        ways = new
    return ways[size]


def invariant_class_count(spec, kind, r, s, D=None, lattices=None, budget=None):
    """Dimension of the space of classes in H^{2r}(A^s)(r) fixed by the torus
    of the given kind: the number of 2r-element subsets of the eigenlines of
    H^1(A^s) whose total character equals r times the Tate twist."""
    if kind in ("P", "L0") and D is None and (lattices is None or lattices.Y_P is None):
        raise ValueError("kind %s needs a decomposition group" % kind)
    T = lattices or torus_lattices(spec, D)
    L = kind_lattice(T, kind)
    G = spec.group
    n = G.order
    pool = _pool(spec, s)
    size = 2 * r
    budget = enum_budget() if budget is None else budget
    nsub = _count_submultisets([c for _, _, c in pool], size)
    if nsub > budget:
        raise EnumerationBudgetExceeded("%d multisets exceed the budget %d" % (nsub, budget))
    basis = L.basis
    twist = tuple(r * (y[0] + y[G.iota]) for y in basis)
    states = {(0, tuple(0 for _ in basis)): 1}
    for i, x, c in pool:
        w = tuple(y[i * n + x] for y in basis)
        new = {}
        for (cnt, tot), ways in states.items():
            for a in range(min(c, size - cnt) + 1):
                key = (cnt + a, tuple(u + a * v for u, v in zip(tot, w)))
                new[key] = new.get(key, 0) + ways * comb(c, a)
        states = new
    return states.get((size, twist), 0)


def invariant_class_count_bruteforce(spec, kind, r, s, D=None):
    """Same count by listing every subset of eigenlines."""
    import itertools
    T = torus_lattices(spec, D)
    L = kind_lattice(T, kind)
    G = spec.group
    n = G.order
    lines = []
    for i, x, c in _pool(spec, s):
        lines.extend([(i, x)] * c)
    count = 0
    for sub in itertools.combinations(range(len(lines)), 2 * r):
        ok = True
        for y in L.basis:
            tot = sum(y[lines[a][0] * n + lines[a][1]] for a in sub)
            if tot != r * (y[0] + y[G.iota]):
                ok = False
                break
        if ok:
            count += 1
    return count


# ---------------------------------------------------------------------------
# the faithfulness claim on characters

def _quotient_relations(labels, conj):
    """Rows cutting out {f : f = iota f, sum f = 0} on a finite iota-set."""
    m = len(labels)
    rows = []
    for a in range(m):
        if a < conj[a]:
            r = [0] * m
            r[a] = 1
            r[conj[a]] = -1
            rows.append(r)
    rows.append([1] * m)
    return rows


def verify_character_span(G, orbit_types, D):
    """For an orbit of CM-types psi_i with Frobenius germs pi(psi_i), decide
    whether span{psi_i - psi_j : pi(psi_i) = pi(psi_j)} equals, up to
    saturation, the kernel of sum a_i psi_i -> sum a_i pi(psi_i), both taken
    in the presented lattices Z[Psi]_0 and Z[Pi]_0."""
    psis = [p.indicator if isinstance(p, galois.CMType) else tuple(p) for p in orbit_types]
    m = len(psis)
    index = {p: a for a, p in enumerate(psis)}
    io = _iota_index(G)
    conj_psi = []
    for p in psis:
        cp = tuple(p[io[x]] for x in range(G.order))
        if cp not in index:
            raise ValueError("orbit is not closed under complex conjugation")
        conj_psi.append(index[cp])
    germs = [frobenius_cocharacter(G, p, D) for p in psis]
    distinct = sorted(set(germs))
    gidx = {g: a for a, g in enumerate(distinct)}
    conj_germ = [gidx[tuple(g[io[x]] for x in range(G.order))] for g in distinct]
    # relations in Z^Psi
    rel_psi = kernel(IntMap(_quotient_relations(psis, conj_psi), None, m))
    # a maps into the relations of Z[Pi] exactly when rel_pi . r(a) = 0
    rel_pi_rows = _quotient_relations(distinct, conj_germ)
    r = [[int(gidx[germs[a]] == b) for a in range(m)] for b in range(len(distinct))]
    comp = [[sum(row[b] * r[b][a] for b in range(len(distinct))) for a in range(m)]
            for row in rel_pi_rows]
    rhs = kernel(IntMap(comp, None, m))
    diffs = []
    for a in range(m):
        for b in range(a):
            if germs[a] == germs[b]:
                v = [0] * m
                v[a], v[b] = 1, -1
                diffs.append(v)
    lhs = join(IntLattice(m, diffs), rel_psi)
    if not contains(rhs, lhs):
        return False
    return saturate(lhs) == rhs


def hg_product_check(specs):
    """True iff rank Hg of the product is the sum of the ranks of Hg."""
    prod = product(specs)
    total = sum(torus_lattices(s).Y_Hg.rank for s in specs)
    return torus_lattices(prod).Y_Hg.rank == total


def check_invariants(spec, D=None, T=None):
    """Structural relations among the lattices; returns a list of failures."""
    G = spec.group
    k = len(spec.factors)
    T = T or torus_lattices(spec, D)
    bad = []
    n = IntLattice(T.ambient, [weight_vector(G, k)])

    def need(ok, what):
        if not ok:
            bad.append(what)
    need(contains(T.Y_S, T.Y_Hg), "Hg in S")
    need(contains(T.Y_MT, T.Y_Hg), "Hg in MT")
    need(contains(T.Y_L, T.Y_MT), "MT in L")
    need(contains(T.Y_L, T.Y_S), "S in L")
    need(T.Y_MT.rank == T.Y_Hg.rank + 1, "rank MT = rank Hg + 1")
    need(saturate(join(T.Y_Hg, n)) == T.Y_MT, "MT = Hg + weight")
    need(T.Y_L.rank == T.Y_S.rank + 1, "rank L = rank S + 1")
    need(meet(T.Y_Hg, minus_lattice(G, k)) == T.Y_Hg, "Hg in minus part")
    if T.Y_P is not None:
        d = len(T.D)
        for nu in T.nu_blocks:
            need(all(nu[x] + nu[G.table[G.iota][x]] == d for x in G.elements()), "nu weight d")
        need(contains(T.Y_P, n), "weight in P")
        need(contains(T.Y_MT, n), "weight in MT")
        need(contains(saturate(meet(T.Y_L0, T.Y_MT)), T.Y_P), "P in L0 meet MT")
        need(contains(T.Y_L, T.Y_L0), "L0 in L")
        neat_p = T.Y_P == T.Y_L0
        star = T.Y_P == saturate(meet(T.Y_L0, T.Y_MT))
        need(not neat_p or star, "neat in char p implies star")
        if T.Y_L0 == T.Y_L:
            need(star == (T.Y_P == T.Y_MT), "L0 = L: star iff P = MT")
    return bad
