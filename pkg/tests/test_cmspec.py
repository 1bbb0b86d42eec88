import random

import pytest
import sympy

from cmlab import cmspec, galois
from cmlab.cmspec import (EnumerationBudgetExceeded, Factor, InvalidSpec, IsogenousReductionFactors,
                          VarietySpec, all_types_spec, check_invariants, hg_product_check,
                          invariant_class_count, invariant_class_count_bruteforce, is_neat_char0,
                          is_neat_charp, single, star_condition, torus_lattices,
                          verify_character_span)
from cmlab.galois import CMType, enumerate_cm_types, group_by_name, right_inv, right_translate


def elliptic(G=None):
    G = G or group_by_name("C2")
    return single(G, G.trivial(), CMType(G.trivial(), [1, 0]))


def primitive_specs(G, index):
    out = []
    for H in G.subgroups():
        if H.index() != index or G.iota in H:
            continue
        for phi in enumerate_cm_types(G, H):
            if right_inv(G, phi.indicator) == H:
                out.append(single(G, H, phi))
    return out


def random_spec(rng, names=("C2", "C4", "C2xC2", "C6", "C8", "C2xC4", "D4", "Q8", "C2xC2xC2")):
    G = group_by_name(rng.choice(names))
    cands = [H for H in G.subgroups() if G.iota not in H]
    factors = []
    for _ in range(rng.randint(1, 3)):
        H = rng.choice(cands)
        phi = rng.choice(enumerate_cm_types(G, H))
        if any(cmspec._isogenous(G, phi.indicator, f.phi.indicator) for f in factors):
            continue
        factors.append(Factor(H, phi, rng.randint(1, 2)))
    return VarietySpec(G, factors)


def rank_MT_oracle(spec):
    G = spec.group
    rows = []
    for g in G.elements():
        row = []
        for mu in spec.blocks():
            row.extend(galois.act(G, g, mu))
        rows.append(row)
    return sympy.Matrix(rows).rank()


def rank_S_oracle(spec):
    # centre is the product of the reflex-free fields K^{right_inv(mu)}
    G = spec.group
    return sum(G.order // len(right_inv(G, f.phi.indicator)) // 2 for f in spec.factors)


def test_elliptic_curve_ranks():
    T = torus_lattices(elliptic())
    assert T.ranks() == {"MT": 2, "Hg": 1, "S": 1, "L": 2}
    assert is_neat_char0(elliptic())


def test_c6_threefold_ranks():
    G = group_by_name("C6")
    H = G.trivial()
    phi = galois.cm_type_from_cosets(H, [0, 1, 5])
    T = torus_lattices(single(G, H, phi))
    assert T.ranks() == {"MT": 4, "Hg": 3, "S": 3, "L": 4}


@pytest.mark.parametrize("seed", range(40))
def test_ranks_against_sympy_oracle(seed):
    spec = random_spec(random.Random(seed))
    T = torus_lattices(spec)
    assert T.Y_MT.rank == rank_MT_oracle(spec)
    assert T.Y_S.rank == rank_S_oracle(spec)
    assert T.Y_Hg.rank == T.Y_MT.rank - 1


@pytest.mark.parametrize("seed", range(40))
def test_invariants_and_star_relations(seed):
    rng = random.Random(1000 + seed)
    spec = random_spec(rng)
    D = rng.choice(spec.group.subgroups())
    T = torus_lattices(spec, D)
    assert check_invariants(spec, D, T) == []
    if is_neat_charp(spec, D, T):
        assert star_condition(spec, D, T)["holds"]


def test_isogenous_reductions_strict():
    # two CM elliptic curves with different fields, both supersingular at an inert prime
    G = group_by_name("C2xC2")
    curves = [Factor(H, CMType(H, [int(x in H) for x in G.elements()]))
              for H in G.subgroups() if H.index() == 2 and G.iota not in H]
    spec = VarietySpec(G, curves)
    T = torus_lattices(spec, G.whole())
    assert T.isogenous_reductions == [(0, 1)]
    assert check_invariants(spec, G.whole(), T) == []
    with pytest.raises(IsogenousReductionFactors):
        torus_lattices(spec, G.whole(), strict=True)


def test_isogenous_factors_rejected():
    G = group_by_name("C6")
    H = G.trivial()
    phi = galois.cm_type_from_cosets(H, [0, 1, 5])
    psi = CMType(H, right_translate(G, 1, phi.indicator))
    with pytest.raises(InvalidSpec):
        VarietySpec(G, [Factor(H, phi), Factor(H, psi)])
    with pytest.raises(InvalidSpec):
        VarietySpec(G, [])


@pytest.mark.parametrize("s", [1, 2, 3])
def test_picard_number_of_power_of_cm_elliptic_curve(s):
    assert invariant_class_count(elliptic(), "MT", 1, s) == s * s


@pytest.mark.parametrize("seed", range(25))
def test_count_matches_bruteforce(seed):
    rng = random.Random(2000 + seed)
    spec = random_spec(rng, ("C2", "C4", "C2xC2", "C6"))
    D = rng.choice(spec.group.subgroups())
    for kind in ("MT", "L", "P", "L0"):
        for r, s in ((1, 1), (1, 2), (2, 1)):
            if 2 * r > 2 * spec.dim * s:
                continue
            assert (invariant_class_count(spec, kind, r, s, D=D)
                    == invariant_class_count_bruteforce(spec, kind, r, s, D=D))


@pytest.mark.parametrize("seed", range(20))
def test_lefschetz_one_one(seed):
    # every Hodge class in H^2 is a divisor class
    spec = random_spec(random.Random(3000 + seed))
    assert invariant_class_count(spec, "MT", 1, 2) == invariant_class_count(spec, "L", 1, 2)


def test_count_budget_and_missing_D():
    with pytest.raises(EnumerationBudgetExceeded):
        invariant_class_count(elliptic(), "MT", 3, 6, budget=1)
    with pytest.raises(ValueError):
        invariant_class_count(elliptic(), "P", 1, 1)


@pytest.mark.parametrize("name", ["C2", "C4", "C2xC2", "C6", "C8", "C2xC4", "C2xC2xC2", "D4", "Q8",
                                  "C10", "C12", "D6", "C2xC6", "Q12", "C20", "C2xC10", "D10", "Q20"])
def test_odd_prime_dimension_primitive_types_are_neat(name):
    G = group_by_name(name)
    for p in (3, 5):
        if G.order % (2 * p):
            continue
        for spec in primitive_specs(G, 2 * p):
            assert is_neat_char0(spec), spec


@pytest.mark.parametrize("name", ["C4", "C2xC2", "C8", "C2xC4", "D4", "Q8", "C2xC2xC2"])
def test_cm_surfaces_are_neat(name):
    G = group_by_name(name)
    for spec in primitive_specs(G, 4):
        assert is_neat_char0(spec)


def test_products_of_elliptic_curves():
    # two non-isogenous CM elliptic curves: K = Q(i, sqrt(-3)) style biquadratic
    G = group_by_name("C2xC2")
    curves = []
    for H in G.subgroups():
        if H.index() == 2 and G.iota not in H:
            curves.append(single(G, H, CMType(H, [int(x in H) for x in G.elements()])))
    assert len(curves) == 2
    assert hg_product_check(curves)
    assert is_neat_char0(cmspec.product(curves))


@pytest.mark.parametrize("D_elems,neat", [([0], True), ([0, 1], True)])
def test_elliptic_germs_neat_in_char_p(D_elems, neat):
    # D trivial: split prime (ordinary); D whole: inert (supersingular)
    E = elliptic()
    D = E.group.subgroup(D_elems)
    assert is_neat_charp(E, D) is neat
    assert star_condition(E, D)["holds"]


def test_all_types_spec_factors_are_distinct_isogeny_classes():
    for name in galois.CATALOG_SMALL:
        G = group_by_name(name)
        spec = all_types_spec(G)
        types = {mu for f in spec.factors for g in G.elements()
                 for mu in [right_translate(G, g, f.phi.indicator)]}
        assert types == {phi.indicator for phi in enumerate_cm_types(G, G.trivial())}


@pytest.mark.parametrize("name", galois.CATALOG_SMALL)
def test_character_span_on_all_orbits(name):
    for G in galois.catalog([name], all_iotas=True):
        for phi in enumerate_cm_types(G, G.trivial()):
            orbit = galois.orbit(G, phi.indicator)
            for D in G.subgroups():
                assert verify_character_span(G, orbit, D)


def test_character_span_rejects_non_closed_orbit():
    G = group_by_name("C4")
    with pytest.raises(ValueError):
        verify_character_span(G, [(1, 1, 0, 0)], G.trivial())
