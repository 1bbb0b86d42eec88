"""Finite groups with a central involution, CM-types and Frobenius germs.

Elements are indices 0..order-1 into a Cayley table, 0 being the identity.
Functions on the group are tuples indexed by element. Conventions:

* an embedding of E = K^H is a left coset xH;
* the group acts on functions by (g.f)(x) = f(g^-1 x);
* the Frobenius cocharacter of a CM-type mu at D is nu = sum_{d in D} d.mu,
  which is left D-invariant; the germ on the prime tau.D is nu(tau^-1).
"""

import itertools
import os
import re
from functools import lru_cache


class NotAGroup(ValueError):
    pass


class IotaNotCentralInvolution(ValueError):
    pass


class IotaInSubgroup(ValueError):
    pass


class MixedGroups(ValueError):
    pass


class GroupTooLarge(ValueError):
    pass


def max_group_order():
    return int(os.environ.get("CMLAB_MAX_GROUP_ORDER", "64"))


class GroupData:
    __slots__ = ("order", "table", "iota", "inv", "name", "_subgroups")

    def __init__(self, table, iota, name=None):
        table = tuple(tuple(int(x) for x in row) for row in table)
        n = len(table)
        if n > max_group_order():
            raise GroupTooLarge("group of order %d exceeds CMLAB_MAX_GROUP_ORDER=%d"
                                % (n, max_group_order()))
        _check_group(table)
        self.order = n
        self.table = table
        self.inv = tuple(row.index(0) for row in table)
        iota = int(iota)
        if not 0 <= iota < n:
            raise IotaNotCentralInvolution("iota %d is not an element" % iota)
        if iota == 0 or table[iota][iota] != 0:
            raise IotaNotCentralInvolution("iota must be an element of order 2")
        if any(table[iota][g] != table[g][iota] for g in range(n)):
            raise IotaNotCentralInvolution("iota is not central")
        self.iota = iota
        self.name = name
        self._subgroups = None

    def __repr__(self):
        return "GroupData(%s, iota=%d)" % (self.name or "order %d" % self.order, self.iota)

    def __eq__(self, other):
        return (isinstance(other, GroupData) and self.table == other.table
                and self.iota == other.iota)

    def __hash__(self):
        return hash((self.table, self.iota))

    def mul(self, a, b):
        return self.table[a][b]

    def elements(self):
        return range(self.order)

    def is_abelian(self):
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def central_involutions(self):
        t = self.table
        return [z for z in range(1, self.order)
                if t[z][z] == 0 and all(t[z][g] == t[g][z] for g in range(self.order))]

    def with_iota(self, iota):
        return GroupData(self.table, iota, self.name)

    def subgroup(self, elements):
        return SubgroupData(self, elements)

    def trivial(self):
        return SubgroupData(self, [0])

    def whole(self):
        return SubgroupData(self, range(self.order))

    def generated(self, gens):
        return SubgroupData(self, _closure(self.table, [0] + list(gens)))

    def subgroups(self):
        """All subgroups, sorted by (order, elements)."""
        if self._subgroups is None:
            found = {frozenset([0])}
            frontier = set(found)
            while frontier:
                new = set()
                for S in frontier:
                    for g in range(self.order):
                        if g not in S:
                            T = frozenset(_closure(self.table, list(S) + [g]))
                            if T not in found:
                                found.add(T)
                                new.add(T)
                frontier = new
            subs = [SubgroupData(self, S, checked=True) for S in found]
            subs.sort(key=lambda s: (len(s), s.elements))
            self._subgroups = tuple(subs)
        return list(self._subgroups)


def _check_group(table):
    n = len(table)
    if n == 0:
        raise NotAGroup("empty table")
    for row in table:
        if len(row) != n or sorted(row) != list(range(n)):
            raise NotAGroup("rows must be permutations of 0..%d" % (n - 1))
    for a in range(n):
        if table[0][a] != a or table[a][0] != a:
            raise NotAGroup("0 is not the identity")
    for a in range(n):
        ta = table[a]
        for b in range(n):
            tab = table[ta[b]]
            tb = table[b]
            for c in range(n):
                if tab[c] != ta[tb[c]]:
                    raise NotAGroup("table is not associative at (%d,%d,%d)" % (a, b, c))


def _closure(table, gens):
    S = {0}
    frontier = set(gens) | {0}
    S |= frontier
    while frontier:
        new = set()
        for a in frontier:
            for b in list(S):
                for c in (table[a][b], table[b][a]):
                    if c not in S:
                        new.add(c)
        S |= new
        frontier = new
    return sorted(S)


class SubgroupData:
    __slots__ = ("parent", "elements", "_set")

    def __init__(self, parent, elements, checked=False):
        els = tuple(sorted(set(int(e) for e in elements)))
        self.parent = parent
        self.elements = els
        self._set = frozenset(els)
        if not checked:
            t = parent.table
            if 0 not in self._set:
                raise NotAGroup("subgroup must contain the identity")
            if any(t[a][b] not in self._set for a in els for b in els):
                raise NotAGroup("subset %r is not closed under the product" % (els,))

    def __contains__(self, g):
        return g in self._set

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other):
        return (isinstance(other, SubgroupData) and self.elements == other.elements
                and self.parent == other.parent)

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return "SubgroupData(%r)" % (list(self.elements),)

    def issubset(self, other):
        return self._set <= other._set

    def index(self):
        return self.parent.order // len(self.elements)

    def is_normal(self):
        G = self.parent
        t = G.table
        return all(t[t[g][h]][G.inv[g]] in self._set for g in G.elements() for h in self.elements)

    def left_cosets(self):
        """Left cosets xH as sorted tuples, ordered by least element."""
        t = self.parent.table
        seen = set()
        out = []
        for x in self.parent.elements():
            if x in seen:
                continue
            c = tuple(sorted(t[x][h] for h in self.elements))
            seen.update(c)
            out.append(c)
        return out

    def right_cosets(self):
        t = self.parent.table
        seen = set()
        out = []
        for x in self.parent.elements():
            if x in seen:
                continue
            c = tuple(sorted(t[h][x] for h in self.elements))
            seen.update(c)
            out.append(c)
        return out

    def product_set(self, other):
        """The set H.K as a sorted tuple."""
        t = self.parent.table
        return tuple(sorted({t[h][k] for h in self.elements for k in other.elements}))


# ---------------------------------------------------------------------------
# catalog

def _cyclic_table(n):
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def _dihedral_table(n):
    # elements r^k s^e stored as k + n*e; s r s = r^-1
    def mul(x, y):
        k1, e1 = x % n, x // n
        k2, e2 = y % n, y // n
        k = (k1 + (k2 if e1 == 0 else -k2)) % n
        return k + n * ((e1 + e2) % 2)
    return [[mul(x, y) for y in range(2 * n)] for x in range(2 * n)]


def _dicyclic_table(m):
    # order 4m: a^k x^e stored as k + 2m*e; a^(2m) = 1, x^2 = a^m, x a x^-1 = a^-1
    n = 2 * m

    def mul(u, v):
        k1, e1 = u % n, u // n
        k2, e2 = v % n, v // n
        if e1 == 0:
            return (k1 + k2) % n + n * e2
        k = (k1 - k2) % n
        if e2 == 0:
            return k + n
        return (k + m) % n
    return [[mul(u, v) for v in range(2 * n)] for u in range(2 * n)]


def _alternating4_table():
    perms = sorted(p for p in itertools.permutations(range(4)) if _sign(p) == 1)
    idx = {p: i for i, p in enumerate(perms)}
    return [[idx[tuple(p[q[i]] for i in range(4))] for q in perms] for p in perms]


def _sign(p):
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def _product_table(t1, t2):
    n1, n2 = len(t1), len(t2)
    return [[t1[a // n2][b // n2] * n2 + t2[a % n2][b % n2]
             for b in range(n1 * n2)] for a in range(n1 * n2)]


def _factor_table(name):
    m = re.fullmatch(r"C(\d+)", name)
    if m:
        return _cyclic_table(int(m.group(1)))
    m = re.fullmatch(r"D(\d+)", name)
    if m and int(m.group(1)) >= 2:
        return _dihedral_table(int(m.group(1)))
    m = re.fullmatch(r"Q(\d+)", name)
    if m and int(m.group(1)) % 4 == 0 and int(m.group(1)) >= 8:
        return _dicyclic_table(int(m.group(1)) // 4)
    if name == "A4":
        return _alternating4_table()
    raise KeyError("unknown group factor %r" % name)


def _default_iota(table):
    n = len(table)
    invs = [z for z in range(1, n)
            if table[z][z] == 0 and all(table[z][g] == table[g][z] for g in range(n))]
    return invs


@lru_cache(maxsize=None)
def group_by_name(name, iota=None):
    """Catalog group: factors Cn, Dn (order 2n), Qn (dicyclic of order n), A4,
    joined by 'x' for direct products. Elements of a product are numbered
    a*|rest| + b. The default iota is the product of the canonical central
    involutions of the factors (those with one)."""
    parts = name.split("x")
    tables = [_factor_table(p) for p in parts]
    table = tables[0]
    for t in tables[1:]:
        table = _product_table(table, t)
    if iota is None:
        comps = []
        for t in tables:
            invs = _default_iota(t)
            comps.append(_canonical_involution(t, invs))
        iota = 0
        for t, c in zip(tables, comps):
            iota = iota * len(t) + c
        if iota == 0:
            raise IotaNotCentralInvolution("%s has no central involution" % name)
    return GroupData(table, iota, name)


def _canonical_involution(table, invs):
    n = len(table)
    if not invs:
        return 0
    # cyclic, dihedral and dicyclic tables all place their canonical central
    # involution at n/2 (resp. the half-turn or x^2)
    if n % 2 == 0 and (n // 2) in invs:
        return n // 2
    return invs[0]


CATALOG_SMALL = ["C2", "C4", "C2xC2", "C6", "C8", "C2xC4", "C2xC2xC2", "D4", "Q8"]

CATALOG_24 = CATALOG_SMALL + [
    "C10", "C12", "C2xC6", "D6", "Q12",
    "C14", "C16", "C2xC8", "C4xC4", "C2xC2xC4", "C2xC2xC2xC2", "D8", "Q16",
    "C2xD4", "C2xQ8",
    "C18", "C3xC6", "C20", "C2xC10", "D10", "Q20",
    "C22", "C24", "C2xC12", "C2xC2xC6", "D12", "Q24", "C2xD6", "C3xD4", "C3xQ8",
    "C4xD3", "C2xQ12", "C2xA4",
]


def catalog(names=None, all_iotas=False, max_order=None):
    """Catalog groups; with all_iotas, one entry per central involution."""
    out = []
    for name in (names or CATALOG_24):
        G = group_by_name(name)
        if max_order is not None and G.order > max_order:
            continue
        if all_iotas:
            for z in G.central_involutions():
                out.append(G if z == G.iota else GroupData(G.table, z, name))
        else:
            out.append(G)
    return out


def build_group(table, iota, name=None):
    return GroupData(table, iota, name)


# ---------------------------------------------------------------------------
# functions on the group

def act(G, g, f):
    """(g.f)(x) = f(g^-1 x), for a tuple, CMType or Germ."""
    if isinstance(f, CMType):
        return CMType(f.H, act(G, g, f.indicator))
    if isinstance(f, Germ):
        return Germ(f.D, act(G, g, f.values))
    gi = G.inv[g]
    t = G.table
    return tuple(f[t[gi][x]] for x in range(G.order))


def right_translate(G, g, f):
    """x -> f(x g)."""
    t = G.table
    return tuple(f[t[x][g]] for x in range(G.order))


def orbit(G, f):
    """Distinct left translates of a function, in first-seen order."""
    seen = []
    s = set()
    for g in G.elements():
        h = act(G, g, f)
        if h not in s:
            s.add(h)
            seen.append(h)
    return seen


def invariance_groups(G, f):
    t = G.table
    n = G.order
    left = [g for g in range(n) if all(f[t[g][x]] == f[x] for x in range(n))]
    right = [h for h in range(n) if all(f[t[x][h]] == f[x] for x in range(n))]
    return {"left_stab": SubgroupData(G, left, checked=True),
            "right_inv": SubgroupData(G, right, checked=True)}


def right_inv(G, f):
    return invariance_groups(G, f)["right_inv"]


class CMType:
    """Indicator function on the group of a CM-type on E = K^H."""

    __slots__ = ("H", "indicator")

    def __init__(self, H, indicator):
        G = H.parent
        indicator = tuple(int(x) for x in indicator)
        if len(indicator) != G.order or any(x not in (0, 1) for x in indicator):
            raise ValueError("indicator must be a 0/1 vector on the group")
        t = G.table
        for x in range(G.order):
            if indicator[x] + indicator[t[G.iota][x]] != 1:
                raise ValueError("not a CM-type: phi + iota.phi != 1 at %d" % x)
            for h in H.elements:
                if indicator[t[x][h]] != indicator[x]:
                    raise ValueError("CM-type is not right-invariant under H")
        self.H = H
        self.indicator = indicator

    @property
    def group(self):
        return self.H.parent

    def support(self):
        return [x for x, v in enumerate(self.indicator) if v]

    def cosets(self):
        """The chosen embeddings, as left cosets of H."""
        return [c for c in self.H.left_cosets() if self.indicator[c[0]]]

    def conjugate(self):
        return CMType(self.H, [1 - v for v in self.indicator])

    def __eq__(self, other):
        return (isinstance(other, CMType) and self.indicator == other.indicator
                and self.H == other.H)

    def __hash__(self):
        return hash(self.indicator)

    def __repr__(self):
        return "CMType(%r)" % (self.support(),)


def cm_type_from_cosets(H, reps):
    """CM-type whose embeddings are the cosets x.H for x in reps."""
    G = H.parent
    t = G.table
    ind = [0] * G.order
    for x in reps:
        for h in H.elements:
            ind[t[x][h]] = 1
    return CMType(H, ind)


def iota_pairs(H):
    """Left cosets of H grouped into conjugate pairs (c, iota.c)."""
    G = H.parent
    if G.iota in H:
        raise IotaInSubgroup("iota lies in H; E = K^H is not CM")
    t = G.table
    cosets = H.left_cosets()
    where = {}
    for k, c in enumerate(cosets):
        for x in c:
            where[x] = k
    pairs = []
    done = set()
    for k, c in enumerate(cosets):
        if k in done:
            continue
        k2 = where[t[G.iota][c[0]]]
        done.update((k, k2))
        pairs.append((c, cosets[k2]))
    return pairs


def enumerate_cm_types(G, H):
    """All 2^([G:H]/2) CM-types on K^H, in binary counting order over the
    conjugate pairs (bit 0 keeps the coset with the least element)."""
    pairs = iota_pairs(H)
    out = []
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        reps = [p[b][0] for p, b in zip(pairs, reversed(bits))]
        out.append(cm_type_from_cosets(H, reps))
    return out


def is_primitive(phi):
    return right_inv(phi.group, phi.indicator) == phi.H


def index2_subfields(G, H):
    """Subgroups H_Q of index 2 containing H and not iota: the imaginary
    quadratic subfields of K^H."""
    if G.iota in H:
        raise IotaInSubgroup("iota lies in H")
    return [S for S in G.subgroups()
            if S.index() == 2 and H.issubset(S) and G.iota not in S]


class Germ:
    """Integer valued function on the primes tau.D, stored on the group
    (constant on left cosets of D)."""

    __slots__ = ("D", "values")

    def __init__(self, D, values):
        G = D.parent
        values = tuple(int(v) for v in values)
        d = len(D)
        t = G.table
        for x in range(G.order):
            if any(values[t[x][s]] != values[x] for s in D.elements):
                raise ValueError("germ is not constant on left cosets of D")
            if values[x] + values[t[G.iota][x]] != d or not 0 <= values[x] <= d:
                raise ValueError("germ violates pi + iota.pi = d")
        self.D = D
        self.values = values

    @property
    def d(self):
        return len(self.D)

    def __eq__(self, other):
        return isinstance(other, Germ) and self.values == other.values and self.D == other.D

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "Germ(%r)" % (list(self.values),)


def frobenius_cocharacter(G, mu, D):
    """nu(x) = sum_{d in D} mu(d^-1 x)."""
    t = G.table
    out = [0] * G.order
    for d in D.elements:
        di = G.inv[d]
        for x in range(G.order):
            out[x] += mu[t[di][x]]
    return tuple(out)


def taniyama_germ(phi, D):
    G = phi.group
    if D.parent != G:
        raise MixedGroups("CM-type and decomposition group live on different groups")
    nu = frobenius_cocharacter(G, phi.indicator, D)
    germ = Germ(D, [nu[G.inv[x]] for x in range(G.order)])
    return {"germ": germ, "nu": nu}
