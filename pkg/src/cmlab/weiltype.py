"""Weil-type structures, almost-neatness and the searches for exotic classes.

An imaginary quadratic field Q inside E = K^H is a subgroup H_Q of index 2
with H contained in H_Q and iota not in H_Q. The embeddings of E lying over
the embedding Q -> K fixed by H_Q are the cosets xH inside H_Q.
"""

from dataclasses import dataclass
from math import lcm

from . import cmspec, galois
from .cmspec import EnumerationBudgetExceeded, Factor, VarietySpec, torus_lattices
from .galois import cm_type_from_cosets, frobenius_cocharacter, right_inv


class IncompatibleSubfield(ValueError):
    pass


class AlreadyBalanced(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


class NotWeilType(ValueError):
    pass


def _check_subfield(G, H_Q):
    if H_Q.parent != G or H_Q.index() != 2 or G.iota in H_Q:
        raise IncompatibleSubfield("H_Q must have index 2 and not contain iota")


def weil_multiplicities(spec, H_Q):
    """(n1, n2): multiplicities of the two embeddings of Q on the tangent space."""
    G = spec.group
    _check_subfield(G, H_Q)
    n1 = n2 = 0
    for f in spec.factors:
        if not f.H.issubset(H_Q):
            raise IncompatibleSubfield("a factor's field does not contain Q")
        inside = sum(1 for x in f.phi.support() if x in H_Q)
        outside = sum(1 for x in f.phi.support() if x not in H_Q)
        n1 += f.multiplicity * inside // len(f.H)
        n2 += f.multiplicity * outside // len(f.H)
    return n1, n2


@dataclass
class WeilStructure:
    spec: VarietySpec
    H_Q: galois.SubgroupData
    n1: int
    n2: int
    chi: tuple

    def pair(self, y):
        return sum(a * b for a, b in zip(y, self.chi))


def determinant_character(spec, H_Q):
    """Block vector pairing a cocharacter with the determinant of the Q-action,
    scaled to be integral (each coset of H_i weighted by its multiplicity)."""
    L = lcm(*[len(f.H) for f in spec.factors])
    chi = ()
    for f in spec.factors:
        w = f.multiplicity * (L // len(f.H))
        chi += tuple(w if x in H_Q else 0 for x in spec.group.elements())
    return chi


def is_weil_type(spec, H_Q):
    n1, n2 = weil_multiplicities(spec, H_Q)
    return n1 == n2


def weil_structure(spec, H_Q):
    n1, n2 = weil_multiplicities(spec, H_Q)
    if n1 != n2:
        raise NotWeilType("multiplicities (%d, %d) differ" % (n1, n2))
    return WeilStructure(spec, H_Q, n1, n2, determinant_character(spec, H_Q))


def weil_subfields(spec):
    """Every H_Q for which (A, Q) is of Weil type."""
    G = spec.group
    out = []
    for S in G.subgroups():
        if S.index() != 2 or G.iota in S:
            continue
        if all(f.H.issubset(S) for f in spec.factors) and is_weil_type(spec, S):
            out.append(S)
    return out


def balance_with_elliptic(spec, H_Q):
    """Add m = |n1 - n2| copies of the elliptic curve with CM by Q whose type
    is the embedding that is under-represented."""
    G = spec.group
    n1, n2 = weil_multiplicities(spec, H_Q)
    if n1 == n2:
        raise AlreadyBalanced("(A, Q) is already of Weil type")
    m = abs(n1 - n2)
    if n2 > n1:
        phi = galois.CMType(H_Q, [int(x in H_Q) for x in G.elements()])
    else:
        phi = galois.CMType(H_Q, [int(x not in H_Q) for x in G.elements()])
    factors = list(spec.factors)
    for k, f in enumerate(factors):
        if f.H == H_Q and f.phi == phi:
            factors[k] = Factor(f.H, f.phi, f.multiplicity + m)
            break
    else:
        factors.append(Factor(H_Q, phi, m))
    try:
        out = VarietySpec(G, factors)
    except cmspec.InvalidSpec:
        raise PreconditionFailed("the balancing curve is isogenous to a factor acting "
                                 "through the other embedding of Q")
    return {"m": m, "augmented": out, "elliptic_type": phi}


def build_weil_example(G, H, H_Q):
    """A of CM-type {phi_0, iota phi_1, ..., iota phi_(m-1)} on E = K^H, where
    phi_0 = H and phi_1.. are the other embeddings over the same embedding of
    Q, together with m - 2 copies of the elliptic curve of type H_Q."""
    if G.iota in H_Q or H_Q.index() != 2 or not H.issubset(H_Q) or G.iota in H:
        raise PreconditionFailed("need H inside H_Q, index 2, iota outside H_Q")
    if H.index() % 2 or H.index() // 2 < 3:
        raise PreconditionFailed("need [G:H] = 2m with m >= 3")
    m = H.index() // 2
    t = G.table
    over = [c for c in H.left_cosets() if c[0] in H_Q]
    reps = [over[0][0]] + [t[G.iota][c[0]] for c in over[1:]]
    phi0 = cm_type_from_cosets(H, reps)
    ell = galois.CMType(H_Q, [int(x in H_Q) for x in G.elements()])
    factors = [Factor(H, phi0, 1)]
    if m > 2:
        factors.append(Factor(H_Q, ell, m - 2))
    return VarietySpec(G, factors)


def almost_neat(struct, lattices=None):
    spec = struct.spec
    if struct.n1 != struct.n2:
        raise NotWeilType("not of Weil type")
    T = lattices or torus_lattices(spec)
    if any(struct.pair(y) for y in T.Y_Hg.basis):
        raise AssertionError("Hg does not act trivially on the Weil classes")
    reaches = any(struct.pair(y) for y in T.Y_S.basis)
    return reaches and T.Y_S.rank == T.Y_Hg.rank + 1


# ---------------------------------------------------------------------------
# Frobenius germs with exotic Tate classes

def germ_cocharacter(germ):
    G = germ.D.parent
    return tuple(germ.values[G.inv[x]] for x in G.elements())


def exotic_frobenius_conditions(germ, H_Q):
    """Conditions on a Weil germ (weight d = |D|) for the simple variety A0
    with End^0 = Q[pi] of degree field_degree, whose norm to Q of pi^2/q is a
    root of unity."""
    D = germ.D
    G = D.parent
    d = len(D)
    nu = germ_cocharacter(germ)
    H0 = right_inv(G, nu)
    t = G.table
    integral = True
    seen = set()
    for x in G.elements():
        if x in seen:
            continue
        dc = {t[t[a][x]][h] for a in D.elements for h in H0.elements}
        seen |= dc
        if (nu[x] * len(dc)) % (d * len(H0)):
            integral = False
    norm_one = False
    if H_Q is not None and H0.issubset(H_Q) and G.iota not in H_Q and H_Q.index() == 2:
        norm_one = all(sum(2 * nu[t[x][h]] - d for h in H_Q.elements) == 0
                       for x in G.elements())
    return {"integrality": integral, "norm_one": norm_one, "field_degree": H0.index()}


@dataclass
class ExoticWitness:
    group: galois.GroupData
    H: galois.SubgroupData
    phi: galois.CMType
    D: galois.SubgroupData
    H_Q: galois.SubgroupData
    nu: tuple

    def spec(self):
        return cmspec.single(self.group, self.H, self.phi)

    def describe(self):
        return {
            "group": self.group.name, "iota": self.group.iota,
            "H": list(self.H.elements), "cm_type": self.phi.support(),
            "D": list(self.D.elements), "H_Q": list(self.H_Q.elements),
            "nu": list(self.nu),
        }


def search_exotic_frobenius(groups, budget=None):
    """All (G, H, phi, D) with [G:H] = 6 whose Frobenius germ generates a
    sextic field, satisfies the integrality condition and has norm one to
    some imaginary quadratic subfield."""
    budget = cmspec.enum_budget() if budget is None else budget
    out = []
    used = 0
    for G in groups:
        if G.order % 6:
            continue
        subs = G.subgroups()
        for H in subs:
            if H.index() != 6 or G.iota in H:
                continue
            fields = galois.index2_subfields(G, H)
            if not fields:
                continue
            for phi in galois.enumerate_cm_types(G, H):
                for D in subs:
                    used += 1
                    if used > budget:
                        raise EnumerationBudgetExceeded("search exceeded %d candidates" % budget)
                    nu = frobenius_cocharacter(G, phi.indicator, D)
                    if right_inv(G, nu) != H:
                        continue
                    germ = galois.Germ(D, [nu[G.inv[x]] for x in G.elements()])
                    for H_Q in fields:
                        c = exotic_frobenius_conditions(germ, H_Q)
                        if c["integrality"] and c["norm_one"] and c["field_degree"] == 6:
                            out.append(ExoticWitness(G, H, phi, D, H_Q, nu))
                            break
    return out


def search_nonneat(groups, dim, budget=None):
    """Simple CM varieties of the given dimension (primitive CM-types) with
    rank Hg < rank S, one per isogeny class."""
    budget = cmspec.enum_budget() if budget is None else budget
    out = []
    used = 0
    for G in groups:
        if G.order % (2 * dim):
            continue
        seen = set()
        for H in G.subgroups():
            if H.index() != 2 * dim or G.iota in H:
                continue
            for phi in galois.enumerate_cm_types(G, H):
                used += 1
                if used > budget:
                    raise EnumerationBudgetExceeded("search exceeded %d candidates" % budget)
                mu = phi.indicator
                if mu in seen or right_inv(G, mu) != H:
                    continue
                for g in G.elements():
                    seen.add(galois.right_translate(G, g, mu))
                spec = cmspec.single(G, H, phi)
                T = torus_lattices(spec)
                if T.Y_Hg.rank < T.Y_S.rank:
                    out.append(spec)
    return out
