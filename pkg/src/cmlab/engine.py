"""Model files, computed predicates and a forward-chaining engine that derives
Hodge / Tate / folklore / Hodge-standard conclusions with their provenance."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import jsonschema

from . import cmspec, galois, hermitian, weiltype

SCHEMA_VERSION = "cmlab-report/1"


class ParseError(ValueError):
    pass


class InvalidModel(ValueError):
    def __init__(self, invariant, message=None):
        super().__init__("%s: %s" % (invariant, message) if message else invariant)
        self.invariant = invariant


class InconsistentFacts(ValueError):
    pass


ASSERTABLE = (
    "general_weil_member",
    "weil_classes_algebraic",
    "det_one_polarization",
    "same_endomorphism_algebra",
    "frobenius_generates_mt",
)

DESCRIPTIONS = {
    "neat_char0": "A is neat (Hg = S)",
    "neat_charp": "the reduction A0 is neat (P = L0)",
    "star": "condition (*): P(A0) = L(A0) meet MT(A)",
    "weil_type": "(A, Q) is of Weil type for some imaginary quadratic Q",
    "almost_neat": "(A, Q) is almost-neat",
    "dim4": "A is a fourfold",
    "simple": "A is simple",
    "reduction": "a reduction A0 is given",
    "det_one_polarization": "(A, Q) has a polarization of determinant 1 modulo norms",
    "neat_threefold_with_elliptic": "A is a neat simple threefold times elliptic curves, with neat reduction",
    "general_weil_member": "(A, Q, lambda) is a general member of its Weil family",
    "weil_classes_algebraic": "the Weil classes on A are algebraic",
    "same_endomorphism_algebra": "End0(A) = End0(A0)",
    "frobenius_generates_mt": "End0(A0) = Q[pi] and pi generates MT(A)",
    "hodge": "Hodge conjecture for A and its powers",
    "tate_char0": "Tate conjecture for A and its powers (characteristic 0)",
    "tate_A0": "Tate conjecture for A0 and its powers",
    "folklore_A0": "folklore conjecture for A0 and its powers",
    "hodge_std_A0": "Hodge standard conjecture for A0 and its powers",
    "hodge_std_A0_s": "Hodge standard conjecture for A0 and l in s(A)",
    "ell_independent": "the Tate and standard conjectures for A0 hold for every l != p",
}

CITATIONS = {
    "R1": "R1 Lefschetz: on a neat A every Hodge class on a power of A is a Lefschetz class",
    "R2": "R2 Tate: on a neat A0 over F every Tate class on a power of A0 is a Lefschetz class",
    "R3": "R3 almost-neat: algebraic Weil classes on an almost-neat (A, Q) give Hodge for A and its powers",
    "R4": "R4 Markman: Weil classes on a polarized Weil-type fourfold of determinant 1 are algebraic",
    "R5": "R5 Mumford-Tate for CM: the Tate and Hodge conjectures for A are equivalent",
    "R6": "R6 reduction: under (*), Hodge for A gives Tate, folklore and Hodge standard for A0",
    "R7": "R7 neat reductions: neat A0 gives (*) and Tate; with equal End0 A is neat; "
          "both neat gives Hodge standard",
    "R8": "R8 general Weil type: algebraic Weil classes on a general member give Hodge for its powers",
    "R9": "R9 simple fourfolds: a simple fourfold is neat or of Weil type for some Q",
    "R10": "R10 l-independence: Tate and standard conjectures for one l != p hold for all l != p",
    "R11": "R11 Ancona: Hodge standard holds on fourfolds for l in s(A), and for all l once Tate holds",
    "R12": "R12 composite: almost-neat Weil type with algebraic Weil classes and (*) gives Hodge, "
           "Tate and the standard conjectures for the products and their reductions",
    "R13": "R13 composites: neat threefolds times elliptic curves over F, and CM fourfolds whose "
           "Frobenius generates MT, satisfy the Tate and standard conjectures",
}


@dataclass(frozen=True)
class Clause:
    rule: str
    premises: tuple      # (name, value) pairs
    conclusions: tuple   # names concluded true


CLAUSES = (
    Clause("R1", (("neat_char0", True),), ("hodge",)),
    Clause("R2", (("neat_charp", True),), ("tate_A0",)),
    Clause("R3", (("almost_neat", True), ("weil_classes_algebraic", True)), ("hodge",)),
    Clause("R4", (("dim4", True), ("weil_type", True), ("det_one_polarization", True)),
           ("weil_classes_algebraic",)),
    Clause("R5", (("hodge", True),), ("tate_char0",)),
    Clause("R5", (("tate_char0", True),), ("hodge",)),
    Clause("R6", (("star", True), ("hodge", True)), ("tate_A0", "folklore_A0", "hodge_std_A0")),
    Clause("R7", (("neat_charp", True),), ("star",)),
    Clause("R7", (("neat_charp", True), ("same_endomorphism_algebra", True)), ("neat_char0",)),
    Clause("R7", (("neat_char0", True), ("neat_charp", True)), ("hodge_std_A0",)),
    Clause("R8", (("general_weil_member", True), ("weil_classes_algebraic", True)), ("hodge",)),
    Clause("R10", (("tate_A0", True), ("hodge_std_A0", True)), ("ell_independent",)),
    Clause("R11", (("dim4", True), ("reduction", True)), ("hodge_std_A0_s",)),
    Clause("R11", (("dim4", True), ("tate_A0", True)), ("hodge_std_A0",)),
    Clause("R12", (("almost_neat", True), ("weil_classes_algebraic", True), ("star", True)),
           ("hodge", "tate_char0", "tate_A0", "hodge_std_A0")),
    Clause("R13", (("neat_threefold_with_elliptic", True),), ("tate_A0", "hodge_std_A0")),
    Clause("R13", (("dim4", True), ("simple", True), ("reduction", True),
                   ("frobenius_generates_mt", True), ("weil_type", False)),
           ("hodge", "tate_A0", "hodge_std_A0")),
    Clause("R13", (("dim4", True), ("simple", True), ("reduction", True),
                   ("frobenius_generates_mt", True), ("weil_type", True),
                   ("det_one_polarization", True)),
           ("hodge", "tate_A0", "hodge_std_A0")),
)


@dataclass
class Fact:
    name: str
    value: bool
    provenance: str              # computed | asserted | derived
    rule: str = None
    citation: str = None
    premises: tuple = ()
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "value": self.value, "provenance": self.provenance,
                "rule": self.rule, "citation": self.citation,
                "premises": list(self.premises), "detail": self.detail}

    @classmethod
    def from_json(cls, d):
        return cls(d["name"], d["value"], d["provenance"], d["rule"], d["citation"],
                   tuple(d["premises"]), d["detail"])


@dataclass
class Model:
    name: str
    spec: cmspec.VarietySpec
    D: galois.SubgroupData = None
    facts: dict = field(default_factory=dict)
    subgroups: dict = field(default_factory=dict)
    riemann: object = None


# ---------------------------------------------------------------------------
# loading

def _schema(name):
    return json.loads(resources.files("cmlab").joinpath("data", name).read_text())


def model_schema():
    return _schema("model.schema.json")


def report_schema():
    return _schema("report.schema.json")


def load_model(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError("cannot read %s: %s" % (path, e))
    return parse_model(data, str(path))


def _rational(x):
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as e:
        raise InvalidModel("rational entries", str(e))


def parse_model(data, source="<model>"):
    try:
        jsonschema.validate(data, model_schema())
    except jsonschema.ValidationError as e:
        raise ParseError("schema violation at %s: %s"
                         % ("/".join(str(p) for p in e.absolute_path) or "<root>", e.message))
    G = _group(data)
    subgroups = {}
    for name, els in data.get("subgroups", {}).items():
        subgroups[name] = _subgroup(G, els, "subgroup %r" % name)

    def ref(x, what):
        if isinstance(x, str):
            if x not in subgroups:
                raise InvalidModel("named subgroups", "%s refers to unknown subgroup %r" % (what, x))
            return subgroups[x]
        return _subgroup(G, x, what)

    factors = []
    for k, f in enumerate(data["factors"]):
        H = ref(f["H"], "factor %d" % k)
        if G.iota in H:
            raise InvalidModel("iota not in H", "factor %d: iota lies in H" % k)
        reps = []
        for c in f["cm_type"]:
            if isinstance(c, list):
                coset = tuple(sorted(c))
                if coset not in H.left_cosets():
                    raise InvalidModel("CM-type cosets", "factor %d: %r is not a left coset of H"
                                       % (k, c))
                reps.append(coset[0])
            else:
                if not 0 <= c < G.order:
                    raise InvalidModel("CM-type cosets", "factor %d: element %d out of range" % (k, c))
                reps.append(c)
        try:
            phi = galois.cm_type_from_cosets(H, reps)
        except ValueError as e:
            raise InvalidModel("phi + iota phi = 1", "factor %d: %s" % (k, e))
        factors.append(cmspec.Factor(H, phi, f.get("multiplicity", 1)))
    try:
        spec = cmspec.VarietySpec(G, factors)
    except ValueError as e:
        raise InvalidModel("pairwise non-isogenous factors", str(e))
    D = ref(data["D"], "D") if "D" in data else None
    pair = None
    if "hermitian" in data:
        h = data["hermitian"]
        psi = [[_rational(x) for x in row] for row in h["psi"]]
        beta = [[_rational(x) for x in row] for row in h["beta"]]
        b = _rational(h["b"])
        if b <= 0:
            raise InvalidModel("b > 0", "b must be positive")
        try:
            pair = hermitian.RiemannPair(psi, beta, b)
            pair.check_beta()
        except hermitian.BadBeta as e:
            raise InvalidModel("beta^2 = -b", str(e))
        except ValueError as e:
            raise InvalidModel("alternating psi", str(e))
        if pair.dim != 2 * spec.dim:
            raise InvalidModel("hermitian dimension", "psi has size %d for a %d-dimensional variety"
                               % (pair.dim, spec.dim))
    name = data.get("name", source)
    return Model(name, spec, D, dict(data.get("facts", {})), subgroups, pair)


def _group(data):
    g = data["group"]
    try:
        if isinstance(g, str):
            return galois.group_by_name(g, data.get("iota"))
        G = galois.build_group(g["table"], g["iota"], g.get("name", "custom"))
        if "iota" in data and data["iota"] != G.iota:
            raise InvalidModel("iota", "conflicting iota values")
        return G
    except galois.GroupTooLarge as e:
        raise InvalidModel("group order bound", str(e))
    except (galois.NotAGroup, galois.IotaNotCentralInvolution) as e:
        raise InvalidModel("group with central involution", str(e))
    except (KeyError, ValueError) as e:
        raise InvalidModel("catalog group", str(e))


def _subgroup(G, els, what):
    if any(not 0 <= e < G.order for e in els):
        raise InvalidModel("subgroup elements", "%s has elements outside the group" % what)
    try:
        return G.subgroup(els)
    except galois.NotAGroup as e:
        raise InvalidModel("subgroup closure", "%s: %s" % (what, e))


# ---------------------------------------------------------------------------
# computed predicates

def _elliptic_split(spec, H_Q):
    """Dimension n of the complement when spec = A x B with B a single elliptic
    curve with CM by Q = K^H_Q (multiplicity 1); None otherwise."""
    ell = [f for f in spec.factors if f.H == H_Q]
    if len(ell) != 1 or ell[0].multiplicity != 1:
        return None
    return spec.dim - 1


def compute_facts(model):
    spec = model.spec
    D = model.D
    G = spec.group
    facts = {}
    info = {"weil": None, "hermitian": None, "annotations": []}

    def put(name, value, detail=""):
        facts[name] = Fact(name, bool(value), "computed", detail=detail)

    T = cmspec.torus_lattices(spec, D)
    info["lattices"] = T
    info["ranks"] = T.ranks()
    put("neat_char0", cmspec.is_neat_char0(spec, T),
        "rank Hg = %d, rank S = %d" % (T.Y_Hg.rank, T.Y_S.rank))
    put("dim4", spec.dim == 4, "dim A = %d" % spec.dim)
    simple = len(spec.factors) == 1 and spec.factors[0].multiplicity == 1
    put("simple", simple, "one factor of multiplicity 1" if simple else "not a single simple factor")
    put("reduction", D is not None, "D = %r" % (list(D.elements),) if D is not None else "no D given")

    subs = weiltype.weil_subfields(spec)
    put("weil_type", bool(subs), "H_Q = %r" % (list(subs[0].elements),) if subs
        else "no index-2 H_Q with equal multiplicities")
    if subs:
        H_Q = subs[0]
        struct = weiltype.weil_structure(spec, H_Q)
        info["weil"] = {"H_Q": list(H_Q.elements), "n1": struct.n1, "n2": struct.n2}
        put("almost_neat", weiltype.almost_neat(struct, T),
            "rank S = %d, rank Hg = %d" % (T.Y_S.rank, T.Y_Hg.rank))
        n = _elliptic_split(spec, H_Q)
        if n is not None and n % 2 == 1 and ((n + 1) // 2) % 2 == 0:
            put("det_one_polarization", True,
                "A is a %d-fold times one elliptic curve; adjusting the polarization on the "
                "elliptic factor gives determinant (-1)^((n+1)/2) = 1" % n)
    else:
        put("almost_neat", False, "not of Weil type")

    if model.riemann is not None:
        info["hermitian"] = hermitian_summary(model.riemann)
        if info["hermitian"]["det_trivial"] and spec.dim == 4 and subs:
            put("det_one_polarization", True, "hermitian form of the given polarization has "
                "determinant 1 modulo norms")

    if D is not None:
        put("neat_charp", cmspec.is_neat_charp(spec, D, T),
            "rank P = %d, rank L0 = %d" % (T.Y_P.rank, T.Y_L0.rank))
        st = cmspec.star_condition(spec, D, T)
        put("star", st["holds"], "rank P = %d, rank of L0 meet MT = %d"
            % (st["ranks"]["P"], st["ranks"]["L0_meet_MT"]))
        three = [f for f in spec.factors if f.dim == 3 and f.multiplicity == 1]
        ell = [f for f in spec.factors if f.H.index() == 2]
        if len(three) == 1 and len(three) + len(ell) == len(spec.factors) \
                and galois.is_primitive(three[0].phi):
            A0 = cmspec.VarietySpec(G, [three[0]])
            put("neat_threefold_with_elliptic", cmspec.is_neat_charp(A0, D),
                "reduction of the threefold factor")
    return facts, info


def hermitian_summary(pair):
    h = hermitian.hermitian_from_riemann(pair)
    sig = hermitian.signature(h)
    dc = hermitian.det_class(h)
    return {
        "b": str(pair.b), "n": h.n, "signature": list(sig),
        "det": str(dc.representative), "det_trivial": dc.is_trivial(),
        "markman_gate": hermitian.markman_gate(h.n, dc),
    }


# ---------------------------------------------------------------------------
# forward chaining

def _holds(facts, name, value):
    f = facts.get(name)
    return f is not None and f.value == value


COMPOSITE = ("R12", "R13")


def _fire(facts, clauses):
    """Apply the clauses until nothing changes; True if anything was added."""
    added = False
    changed = True
    while changed:
        changed = False
        for cl in clauses:
            if not all(_holds(facts, n, v) for n, v in cl.premises):
                continue
            for c in cl.conclusions:
                old = facts.get(c)
                if old is None:
                    facts[c] = Fact(c, True, "derived", cl.rule, CITATIONS[cl.rule],
                                    tuple(n for n, _ in cl.premises))
                    changed = added = True
                elif not old.value:
                    raise InconsistentFacts("%s derives %s but it is %s false"
                                            % (cl.rule, c, old.provenance))
    return added


def chain(base):
    """Fixed point of the clauses over the base facts (computed and asserted).
    Returns (all facts, open premises)."""
    facts = dict(base)
    if _holds(facts, "general_weil_member", True) and _holds(facts, "weil_type", False):
        raise InconsistentFacts("general_weil_member asserted but A is not of Weil type")
    # elementary rules run to a fixed point before any composite rule is tried,
    # so derivations cite the shortest chain of elementary steps
    elementary = [cl for cl in CLAUSES if cl.rule not in COMPOSITE]
    composite = [cl for cl in CLAUSES if cl.rule in COMPOSITE]
    while _fire(facts, elementary) or _fire(facts, composite):
        pass
    opens = []
    seen = set()
    for cl in CLAUSES:
        if all(_holds(facts, c, True) for c in cl.conclusions):
            continue
        missing = [n for n, v in cl.premises if n not in facts]
        rest = [(n, v) for n, v in cl.premises if n in facts]
        if not missing or any(n not in ASSERTABLE for n in missing):
            continue
        if not all(_holds(facts, n, v) for n, v in rest):
            continue
        key = (cl.rule, tuple(missing))
        if key in seen:
            continue
        seen.add(key)
        opens.append({"rule": cl.rule, "citation": CITATIONS[cl.rule], "missing": missing,
                      "would_conclude": [c for c in cl.conclusions if not _holds(facts, c, True)]})
    return facts, opens


def derive_conclusions(model, extra_facts=None):
    computed, info = compute_facts(model)
    asserted = dict(model.facts)
    asserted.update(extra_facts or {})
    base = dict(computed)
    for name, value in sorted(asserted.items()):
        if name not in ASSERTABLE:
            raise ParseError("unknown fact %r" % name)
        if name in base:
            if base[name].value != value:
                raise InconsistentFacts("%s asserted %s but computed %s"
                                        % (name, value, base[name].value))
            continue
        base[name] = Fact(name, bool(value), "asserted", detail="user assertion")
    facts, opens = chain(base)
    return _report(model, info, facts, opens)


def _annotations(facts, model):
    out = []
    if _holds(facts, "dim4", True) and _holds(facts, "simple", True):
        ok = _holds(facts, "neat_char0", True) or _holds(facts, "weil_type", True)
        out.append({"rule": "R9", "citation": CITATIONS["R9"],
                    "text": "simple fourfold: " + ("consistent (neat or of Weil type)" if ok
                                                   else "neither neat nor of Weil type")})
    if _holds(facts, "neat_charp", False):
        out.append({"rule": "R2", "citation": CITATIONS["R2"],
                    "text": "A0 is not neat: powers of A0 carry exotic Tate classes"})
    if _holds(facts, "star", False):
        out.append({"rule": "R6", "citation": CITATIONS["R6"],
                    "text": "condition (*) fails; the reduction transfer does not apply"})
    if _holds(facts, "ell_independent", True):
        out.append({"rule": "R10", "citation": CITATIONS["R10"],
                    "text": "the conclusions for A0 hold for every l != p"})
    return out


def _report(model, info, facts, opens):
    spec = model.spec
    G = spec.group
    base = sorted((f for f in facts.values() if f.provenance == "computed"), key=lambda f: f.name)
    assumed = sorted((f for f in facts.values() if f.provenance == "asserted"), key=lambda f: f.name)
    derived = sorted((f for f in facts.values() if f.provenance == "derived"), key=lambda f: f.name)
    failures = cmspec.check_invariants(spec, model.D, info["lattices"])
    return {
        "schema": SCHEMA_VERSION,
        "model": {
            "name": model.name, "group": G.name, "order": G.order, "iota": G.iota,
            "dim": spec.dim,
            "factors": [{"H": list(f.H.elements), "cm_type": f.phi.support(),
                         "multiplicity": f.multiplicity} for f in spec.factors],
            "D": list(model.D.elements) if model.D is not None else None,
        },
        "ranks": dict(sorted(info["ranks"].items())),
        "weil": info["weil"],
        "hermitian": info["hermitian"],
        "facts": [f.to_json() for f in base],
        "assumed": [f.to_json() for f in assumed],
        "conclusions": [f.to_json() for f in derived],
        "open_premises": opens,
        "annotations": _annotations(facts, model),
        "invariant_failures": list(failures),
    }


def replay(report):
    """Re-run the chaining on the computed and asserted facts of a report and
    return the derived conclusion set."""
    base = {}
    for d in report["facts"] + report["assumed"]:
        f = Fact.from_json(d)
        base[f.name] = f
    facts, _ = chain(base)
    return sorted(f.to_json()["name"] for f in facts.values() if f.provenance == "derived")


# ---------------------------------------------------------------------------
# rendering

def render_report(report, fmt="text"):
    if fmt == "json":
        jsonschema.validate(report, report_schema())
        return (json.dumps(report, indent=2, sort_keys=True) + "\n").encode("utf-8")
    if fmt != "text":
        raise ValueError("unknown format %r" % fmt)
    return _render_text(report).encode("utf-8")


def _render_text(rep):
    m = rep["model"]
    lines = ["cmlab report (%s)" % rep["schema"], "model: %s" % m["name"],
             "group: %s (order %d, iota = %d), dim A = %d" % (m["group"], m["order"], m["iota"], m["dim"])]
    for k, f in enumerate(m["factors"]):
        lines.append("  factor %d: H = %s, CM-type support %s, multiplicity %d"
                     % (k, f["H"], f["cm_type"], f["multiplicity"]))
    lines.append("  D = %s" % (m["D"] if m["D"] is not None else "none"))
    lines.append("")
    lines.append("lattice ranks:")
    for k, v in rep["ranks"].items():
        lines.append("  %-6s %d" % (k, v))
    if rep.get("weil"):
        w = rep["weil"]
        lines.append("Weil type for H_Q = %s with (n1, n2) = (%d, %d)" % (w["H_Q"], w["n1"], w["n2"]))
    if rep.get("hermitian"):
        h = rep["hermitian"]
        lines.append("hermitian form: signature %s, det %s (%s modulo norms)"
                     % (tuple(h["signature"]), h["det"], "trivial" if h["det_trivial"] else "nontrivial"))
    lines.append("")
    lines.append("computed:")
    for f in rep["facts"]:
        lines.append("  %-30s %-5s  %s" % (f["name"], f["value"], f["detail"]))
    lines.append("assumed:")
    if not rep["assumed"]:
        lines.append("  (none)")
    for f in rep["assumed"]:
        lines.append("  %-30s %-5s" % (f["name"], f["value"]))
    lines.append("")
    lines.append("conclusions:")
    if not rep["conclusions"]:
        lines.append("  (none)")
    index = {f["name"]: f for f in rep["facts"] + rep["assumed"] + rep["conclusions"]}
    for f in rep["conclusions"]:
        lines.append("  %s: %s" % (f["name"], DESCRIPTIONS.get(f["name"], f["name"])))
        _tree(lines, index, f["name"], 2, set())
    if rep["open_premises"]:
        lines.append("")
        lines.append("open premises:")
        for o in rep["open_premises"]:
            lines.append("  %s needs %s to conclude %s" % (o["rule"], ", ".join(o["missing"]),
                                                            ", ".join(o["would_conclude"])))
    if rep["annotations"]:
        lines.append("")
        lines.append("annotations:")
        for a in rep["annotations"]:
            lines.append("  [%s] %s" % (a["rule"], a["text"]))
    if rep["invariant_failures"]:
        lines.append("")
        lines.append("invariant failures:")
        for x in rep["invariant_failures"]:
            lines.append("  " + x)
    return "\n".join(lines) + "\n"


def _tree(lines, index, name, depth, path):
    f = index[name]
    pad = "  " * depth
    if f["provenance"] != "derived":
        lines.append("%s%s [%s]" % (pad, name, f["provenance"]))
        return
    lines.append("%s%s <- %s: %s" % (pad, name, f["rule"], f["citation"]))
    if name in path:
        return
    for p in f["premises"]:
        _tree(lines, index, p, depth + 1, path | {name})
