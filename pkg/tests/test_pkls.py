import time

import pytest
import sympy
from sympy.matrices.normalforms import hermite_normal_form

from cmlab import cmspec, galois
from cmlab.cmspec import EnumerationBudgetExceeded
from cmlab.galois import group_by_name
from cmlab.pkls import balanced, build_square, ker_r, ker_s, quotient, verify_pkls


def pairs(max_order=8):
    for G in galois.catalog(max_order=max_order, all_iotas=True):
        for D in G.subgroups():
            yield G, D


def hnf_columns(vectors, n):
    if not vectors:
        return sympy.zeros(n, 0)
    M = sympy.Matrix([list(v) for v in vectors]).T
    H = hermite_normal_form(M)
    return H


def same_lattice(A, B, n):
    """Z-span equality via sympy HNF of the joined generators."""
    if not A and not B:
        return True
    HA = hnf_columns(A, n)
    HB = hnf_columns(B, n)
    HAB = hnf_columns(list(A) + list(B), n)
    return HA == HAB == HB


def test_c2_examples():
    G = group_by_name("C2")
    triv = verify_pkls(G, G.trivial())
    assert triv["surjective"]
    assert triv["certificate"]["ranks"] == {"Z[S]_0": 2, "Z[G]^1": 2, "Z[P]_0": 2, "Z[G/D]^d": 2,
                                            "Ker r": 0, "Ker s": 0}
    whole = verify_pkls(G, G.whole())
    c = whole["certificate"]
    assert c["ker_s_basis"] == [[1, -1]]
    assert c["preimages"] is not None
    assert c["case"] == "I" and c["d"] == 2


def test_presented_lattices():
    T = quotient("q", ["a", "b", "c", "d"], [1, 0, 3, 2])
    # relations {f : f = iota f, sum f = 0} are spanned by (1, 1, -1, -1)
    assert T.lattice.basis == ((1, 1, -1, -1),)
    assert T.rank == 3
    assert len(T.coordinates()) == 3
    B = balanced("b", [0, 1], [1, 0], 2)
    assert (1, 1) in B.lattice and (2, 0) in B.lattice and (1, 0) not in B.lattice
    with pytest.raises(ValueError):
        B.coordinates()


@pytest.mark.parametrize("G,D", list(pairs()), ids=lambda x: repr(x))
def test_square_and_surjectivity(G, D):
    res = verify_pkls(G, D)
    sq = res["square"]
    assert sq.commutes()
    assert res["surjective"]
    cert = res["certificate"]
    Ks = res["ker_s"]
    for x, t in zip(cert["preimages"], cert["ker_s_basis"]):
        assert x in res["ker_r"]
        assert list(sq.j.apply(x)) == t
    assert cert["structured_valid"]
    # independent: j(Ker r) and Ker s have the same HNF
    n = G.order
    jk = [sq.j.apply(v) for v in res["ker_r"].basis]
    assert same_lattice(jk, list(Ks.basis), n)
    # cross path: star on the all-types spec
    spec = cmspec.all_types_spec(G)
    assert cmspec.star_condition(spec, D)["holds"] == res["surjective"]


def test_both_cases_occur():
    cases = {verify_pkls(G, D)["certificate"]["case"] for G, D in pairs(4)}
    assert cases == {"I", "II"}


def test_ker_s_oracle_c4():
    G = group_by_name("C4")
    D = G.subgroup([0, 2])
    sq = build_square(G, D)
    Ks = ker_s(sq)
    # f with f + iota f = 0 (iota = 2) and f(x) + f(x+2) = 0 on cosets of D: all such f
    sols = [v for v in __import__("itertools").product(range(-2, 3), repeat=4)
            if all(v[x] + v[(x + 2) % 4] == 0 for x in range(4))]
    assert all(v in Ks for v in sols)
    assert Ks.rank == 2
    Kr = ker_r(sq)
    assert Kr.rank >= sq.lattice_T.lattice.rank


def test_budget():
    G = group_by_name("C2xC2xC2")
    with pytest.raises(EnumerationBudgetExceeded):
        build_square(G, G.whole(), budget=4)


def test_sweep_is_fast():
    t = time.perf_counter()
    for G, D in pairs():
        verify_pkls(G, D)
    assert time.perf_counter() - t < 60
