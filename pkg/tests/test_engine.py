import itertools
import json
from pathlib import Path

import jsonschema
import pytest

from cmlab import engine
from cmlab.engine import (ASSERTABLE, InconsistentFacts, InvalidModel, ParseError,
                          derive_conclusions, load_model, parse_model, render_report, replay)

HERE = Path(__file__).parent
MODELS = HERE / "models"
GOLDEN = HERE / "golden"
NAMES = ["weil_threefold_c6", "elliptic_pair_split", "exotic_sextic_d6", "weil_fourfold_c2xa4"]


def model_data(name):
    return json.loads((MODELS / (name + ".json")).read_text())


def report(name, extra=None):
    return derive_conclusions(load_model(MODELS / (name + ".json")), extra)


def conclusions(rep):
    return {c["name"]: c["rule"] for c in rep["conclusions"]}


@pytest.mark.parametrize("name", NAMES)
def test_golden_reports(name):
    got = render_report(report(name), "json")
    assert got == (GOLDEN / (name + ".json")).read_bytes()


def test_packaged_example_matches_test_model():
    from importlib import resources
    packaged = json.loads(resources.files("cmlab").joinpath("data", "examples",
                                                            "weil_threefold_c6.json").read_text())
    assert packaged == model_data("weil_threefold_c6")


def test_weil_threefold_chain():
    rep = report("weil_threefold_c6")
    c = conclusions(rep)
    assert c["weil_classes_algebraic"] == "R4"
    assert c["hodge"] == "R3"
    for name in ("tate_A0", "folklore_A0", "hodge_std_A0"):
        assert c[name] == "R6"
    assert rep["ranks"]["MT"] == 4
    assert rep["weil"] == {"H_Q": [0, 2, 4], "n1": 2, "n2": 2}
    assert rep["invariant_failures"] == []
    facts = {f["name"]: f["value"] for f in rep["facts"]}
    assert facts["star"] and facts["almost_neat"] and not facts["neat_char0"]


def test_elliptic_pair_split_prime():
    c = conclusions(report("elliptic_pair_split"))
    assert c["hodge"] == "R1"
    assert "tate_A0" in c and "hodge_std_A0" in c


def test_exotic_model_does_not_transfer():
    rep = report("exotic_sextic_d6")
    facts = {f["name"]: f["value"] for f in rep["facts"]}
    assert facts["star"] is False
    assert not any(c["rule"] == "R6" for c in rep["conclusions"])
    assert "tate_A0" not in conclusions(rep)
    assert {a["rule"] for a in rep["annotations"]} >= {"R2", "R6"}


def test_open_premises_and_assertions():
    rep = report("weil_fourfold_c2xa4")
    assert conclusions(rep) == {}
    missing = {(o["rule"], tuple(o["missing"])) for o in rep["open_premises"]}
    assert ("R4", ("det_one_polarization",)) in missing
    rep2 = report("weil_fourfold_c2xa4", {"det_one_polarization": True})
    c = conclusions(rep2)
    assert c["weil_classes_algebraic"] == "R4" and c["hodge"] == "R3"
    assert rep2["assumed"][0]["provenance"] == "asserted"


def test_citations_are_descriptive():
    for rule, text in engine.CITATIONS.items():
        assert text.startswith(rule + " ")
    for cl in engine.CLAUSES:
        assert cl.rule in engine.CITATIONS


@pytest.mark.parametrize("name", NAMES)
def test_schema_roundtrip_and_replay(name):
    rep = report(name)
    jsonschema.validate(rep, engine.report_schema())
    back = json.loads(render_report(rep, "json"))
    assert back == rep
    assert replay(back) == sorted(c["name"] for c in rep["conclusions"])


def test_monotonicity_in_assertions():
    names = [n for n in ASSERTABLE if n != "det_one_polarization"]
    base = set(conclusions(report("weil_fourfold_c2xa4")))
    for k in range(len(names) + 1):
        for subset in itertools.combinations(names, k):
            extra = {n: True for n in subset}
            got = set(conclusions(report("weil_fourfold_c2xa4", extra)))
            assert base <= got
            for more in names:
                if more not in subset:
                    assert got <= set(conclusions(report("weil_fourfold_c2xa4", dict(extra, **{more: True}))))


def test_inconsistent_facts():
    with pytest.raises(InconsistentFacts):
        report("weil_threefold_c6", {"det_one_polarization": False})
    with pytest.raises(InconsistentFacts):
        report("elliptic_pair_split", {"general_weil_member": True})
    with pytest.raises(InconsistentFacts):
        report("weil_threefold_c6", {"weil_classes_algebraic": False})


def test_unknown_fact():
    with pytest.raises(ParseError):
        report("weil_threefold_c6", {"hodge": True})


@pytest.mark.parametrize("mutate,invariant", [
    (lambda d: d["factors"][0].update(H=[0, 3]), "iota not in H"),
    (lambda d: d["factors"][0].update(cm_type=[[0], [1], [4]]), "phi + iota phi = 1"),
    (lambda d: d["factors"][0].update(cm_type=[[0, 1], [5]]), "CM-type cosets"),
    (lambda d: d["factors"][0].update(H="nope"), "named subgroups"),
    (lambda d: d["subgroups"].update(H=[0, 1]), "subgroup closure"),
    (lambda d: d["subgroups"].update(H=[0, 9]), "subgroup elements"),
    (lambda d: d.update(group="C7"), "group with central involution"),
    (lambda d: d.update(group="Z99"), "catalog group"),
    (lambda d: d.update(group={"table": [[0, 1], [1, 0]], "iota": 0}), "group with central involution"),
    (lambda d: d["factors"].append({"H": "H", "cm_type": [[1], [2], [0]]}),
     "pairwise non-isogenous factors"),
])
def test_invalid_models(mutate, invariant):
    d = model_data("weil_threefold_c6")
    mutate(d)
    with pytest.raises(InvalidModel) as e:
        parse_model(d)
    assert e.value.invariant == invariant


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("factors"),
    lambda d: d.update(facts={"hodge": True}),
    lambda d: d.update(extra=1),
    lambda d: d["factors"][0].update(multiplicity=0),
])
def test_schema_violations(mutate):
    d = model_data("weil_threefold_c6")
    mutate(d)
    with pytest.raises(ParseError):
        parse_model(d)


def test_unreadable_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_model(p)
    with pytest.raises(ParseError):
        load_model(tmp_path / "missing.json")


def hermitian_model(diag, b=3):
    """The C6 Weil-type model with the polarization given by a diagonal
    hermitian form, written as a Riemann pair."""
    from cmlab import hermitian
    from fractions import Fraction
    F = hermitian.QuadField(b)
    n = len(diag)
    ent = [[(Fraction(diag[i]) if i == j else Fraction(0), Fraction(0)) for j in range(n)]
           for i in range(n)]
    pair = hermitian.riemann_from_hermitian(hermitian.HermitianForm(F, ent))
    d = model_data("weil_fourfold_c2xa4")
    d["hermitian"] = {"psi": [[str(x) for x in row] for row in pair.psi],
                      "beta": [[str(x) for x in row] for row in pair.beta], "b": str(b)}
    return parse_model(d)


def test_hermitian_determinant_feeds_det_one():
    # signature (2, 2), determinant 1 * 1 * (-1) * (-1) = 1: trivial class
    rep = derive_conclusions(hermitian_model([1, 1, -1, -1]))
    assert rep["hermitian"]["signature"] == [2, 2]
    assert rep["hermitian"]["markman_gate"]
    assert conclusions(rep)["weil_classes_algebraic"] == "R4"
    # determinant 2 is not a norm from Q(sqrt -3)
    rep = derive_conclusions(hermitian_model([1, 2, -1, -1]))
    assert not rep["hermitian"]["det_trivial"]
    assert "weil_classes_algebraic" not in conclusions(rep)


def test_hermitian_model_errors():
    d = model_data("weil_fourfold_c2xa4")
    d["hermitian"] = {"psi": [["0", "1"], ["-1", "0"]], "beta": [["1", "0"], ["0", "1"]], "b": "1"}
    with pytest.raises(InvalidModel) as e:
        parse_model(d)
    assert e.value.invariant == "beta^2 = -b"
    d["hermitian"] = {"psi": [["0", "1"], ["-1", "0"]], "beta": [["0", "-1"], ["1", "0"]], "b": "1"}
    with pytest.raises(InvalidModel) as e:
        parse_model(d)
    assert e.value.invariant == "hermitian dimension"
