"""Command line interface: ``eval``, ``check``, ``build`` and ``report``.

Workspaces are JSON documents with the sections ``terms``, ``assemblies``,
``morphisms``, ``groupoids``, ``functors`` and ``polys``.  Exit codes:
0 yes / normal form, 1 usage or schema error, 2 out of fuel, 3 no,
4 unknown.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Mapping, Sequence

from . import asm as A
from . import fib, grpd, ho, wset
from .pca import (
    DEFAULT_FUEL, K, KBAR, STD_NAMES, Normal, Term, TermSyntaxError, evaluate, free_vars, parse_term, show,
    std, substitute,
)
from .rset import (
    All, Compl, Fin, Imp, Inter, PairOf, RealizerSet, Tag, Tri, Union, enumerate_set, no, unknown, yes,
)

EXIT_OK, EXIT_USAGE, EXIT_FUEL, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2, 3, 4
DEFAULT_BUDGET = 7
SECTIONS = ("terms", "assemblies", "morphisms", "groupoids", "functors", "polys")
INFO_SECTIONS = ("verification", "wtrees")
CHECKS = ("morphism", "groupoid", "functor", "fibration", "sds", "regeq", "zero-type", "neg-one-type",
          "discrete", "modest")
RECIPES = ("product", "coproduct", "equalizer", "coequalizer", "partitioning", "part", "clus", "comma",
           "exponential", "path-object", "interval", "dependent-product", "truncate0", "truncate-neg1", "wtrees")

Label = Hashable


class SchemaError(ValueError):
    """A malformed document or ill-kinded arguments (exit code 1)."""


# ------------------------------------------------------------------ names

def label_name(x: Any) -> str:
    """Deterministic printable name for a carrier label."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Term):
        return show(x)
    if isinstance(x, tuple):
        return "(" + ",".join(label_name(y) for y in x) + ")"
    if isinstance(x, (frozenset, set)):
        return "{" + ",".join(sorted(label_name(y) for y in x)) + "}"
    if hasattr(x, "values") and hasattr(x, "f") and isinstance(getattr(x, "values"), tuple):
        return "η" + label_name((x.f, x.values))
    return repr(x)


@dataclass
class Names:
    """Bijection between carrier labels and the strings used in documents."""
    to_name: dict = field(default_factory=dict)
    to_label: dict = field(default_factory=dict)

    @classmethod
    def of(cls, labels: Sequence[Label], given: Mapping[Label, str] | None = None) -> "Names":
        n = cls()
        for x in labels:
            base = given[x] if given and x in given else label_name(x)
            name, k = base, 1
            while name in n.to_label:
                k += 1
                name = f"{base}#{k}"
            n.to_name[x], n.to_label[name] = name, x
        return n

    def label(self, name: str, what: str) -> Label:
        if not isinstance(name, str) or name not in self.to_label:
            raise SchemaError(f"{what}: unknown name {name!r}")
        return self.to_label[name]


# ---------------------------------------------------------------- workspace

@dataclass
class Workspace:
    doc: dict
    terms: dict[str, Term] = field(default_factory=dict)
    assemblies: dict[str, A.Assembly] = field(default_factory=dict)
    asm_names: dict[str, Names] = field(default_factory=dict)
    morphisms: dict[str, A.AsmMorphism] = field(default_factory=dict)
    groupoids: dict[str, grpd.GroupoidAssembly] = field(default_factory=dict)
    obj_names: dict[str, Names] = field(default_factory=dict)
    mor_names: dict[str, Names] = field(default_factory=dict)
    functors: dict[str, grpd.GFunctor] = field(default_factory=dict)
    functor_extra: dict[str, dict] = field(default_factory=dict)
    polys: dict[str, wset.PolySpec] = field(default_factory=dict)

    def groupoid_name(self, G: grpd.GroupoidAssembly) -> str:
        for k, v in self.groupoids.items():
            if v is G:
                return k
        raise KeyError("groupoid not in workspace")

    def kind(self, name: str) -> str | None:
        for sec in SECTIONS:
            if name in getattr(self, sec):
                return sec
        return None


def _require(obj: Any, typ: type | tuple, where: str) -> Any:
    if not isinstance(obj, typ):
        want = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise SchemaError(f"{where}: expected {want}, got {type(obj).__name__}")
    return obj


def _term(ws: Workspace, text: Any, where: str) -> Term:
    _require(text, str, where)
    try:
        t = parse_term(text)
    except TermSyntaxError as e:
        raise SchemaError(f"{where}: {e}") from None
    return _resolve(ws, t)


def _resolve(ws: Workspace, t: Term) -> Term:
    """Replace free variables naming workspace terms or standard combinators."""
    for v in sorted(free_vars(t)):
        if v in ws.terms:
            t = substitute(t, v, ws.terms[v])
        elif v in STD_NAMES:
            t = substitute(t, v, std(v))
    return t


def _rset(ws: Workspace, spec: Any, where: str) -> RealizerSet:
    _require(spec, dict, where)
    if len(spec) != 1:
        raise SchemaError(f"{where}: a realizer set has exactly one tag")
    (tag, body), = spec.items()
    if tag == "fin":
        return Fin([_term(ws, t, where) for t in _require(body, list, where)])
    if tag == "all":
        return All()
    if tag == "pair":
        a, b = _pair_of(body, where)
        return PairOf(_rset(ws, a, where), _rset(ws, b, where))
    if tag == "tag":
        flag, inner = _pair_of(body, where)
        if flag not in ("k", "kbar"):
            raise SchemaError(f"{where}: tag flag must be 'k' or 'kbar'")
        return Tag(K if flag == "k" else KBAR, _rset(ws, inner, where))
    if tag == "union":
        parts = [_rset(ws, r, where) for r in _require(body, list, where)]
        if not parts:
            return Fin()
        out = parts[0]
        for p in parts[1:]:
            out = Union(out, p)
        return out
    if tag == "inter":
        a, b = _pair_of(body, where)
        return Inter(_rset(ws, a, where), _rset(ws, b, where))
    if tag == "compl":
        return Compl(_rset(ws, body, where))
    if tag == "imp":
        dom, tgt = _pair_of(body, where)
        return Imp([([_term(ws, t, where) for t in _require(dom, list, where)], _rset(ws, tgt, where))])
    if tag == "imps":
        cases = []
        for case in _require(body, list, where):
            dom, tgt = _pair_of(case, where)
            cases.append(([_term(ws, t, where) for t in _require(dom, list, where)], _rset(ws, tgt, where)))
        return Imp(cases)
    raise SchemaError(f"{where}: unknown realizer set tag {tag!r}")


def _pair_of(body: Any, where: str) -> tuple:
    if not isinstance(body, list) or len(body) != 2:
        raise SchemaError(f"{where}: expected a two-element list")
    return body[0], body[1]


def dump_rset(R: RealizerSet) -> Any:
    if isinstance(R, Fin):
        return {"fin": [show(t) for t in R.elements]}
    if isinstance(R, All):
        return {"all": True}
    if isinstance(R, PairOf):
        return {"pair": [dump_rset(R.fst), dump_rset(R.snd)]}
    if isinstance(R, Tag):
        return {"tag": ["k" if R.flag is K else "kbar", dump_rset(R.inner)]}
    if isinstance(R, Union):
        return {"union": [dump_rset(R.l), dump_rset(R.r)]}
    if isinstance(R, Inter):
        return {"inter": [dump_rset(R.l), dump_rset(R.r)]}
    if isinstance(R, Compl):
        return {"compl": dump_rset(R.inner)}
    if isinstance(R, Imp):
        if R.approx:
            raise SchemaError("approximate implication sets cannot be written")
        cases = [[[show(t) for t in d], dump_rset(tgt)] for d, tgt in R.cases]
        if len(cases) == 1:
            return {"imp": cases[0]}
        return {"imps": cases}
    raise SchemaError(f"realizer set {type(R).__name__} cannot be written")


# -------------------------------------------------------------- loading

def _load_terms(ws: Workspace, sec: Mapping) -> None:
    state: dict[str, int] = {}

    def visit(name: str) -> None:
        if state.get(name) == 2:
            return
        if state.get(name) == 1:
            raise SchemaError(f"terms.{name}: cyclic definition")
        state[name] = 1
        text = _require(sec[name], str, f"terms.{name}")
        try:
            t = parse_term(text)
        except TermSyntaxError as e:
            raise SchemaError(f"terms.{name}: {e}") from None
        for v in sorted(free_vars(t)):
            if v in sec and v != name:
                visit(v)
        ws.terms[name] = _resolve(ws, t)
        state[name] = 2

    for name in sorted(sec):
        visit(name)


def _load_assembly(ws: Workspace, name: str, spec: Any) -> None:
    where = f"assemblies.{name}"
    _require(spec, dict, where)
    pts = _require(spec.get("points", {}), dict, where + ".points")
    real = {p: _rset(ws, r, f"{where}.points.{p}") for p, r in pts.items()}
    wit_spec = _require(spec.get("witness", {}), dict, where + ".witness")
    wit = {p: _term(ws, wit_spec[p], f"{where}.witness.{p}") for p in pts if p in wit_spec}
    try:
        asm = A.Assembly(list(pts), real, lambda p: wit[p] if p in wit else _first(real[p], where, p))
    except (A.AssemblyError, ValueError) as e:
        raise SchemaError(f"{where}: {e}") from None
    ws.assemblies[name] = asm
    ws.asm_names[name] = Names.of(asm.carrier)


def _first(R: RealizerSet, where: str, p: str) -> Term:
    items = enumerate_set(R)
    if not items:
        raise SchemaError(f"{where}: point {p!r} needs a witness")
    return items[0]


def _load_morphism(ws: Workspace, name: str, spec: Any) -> None:
    where = f"morphisms.{name}"
    _require(spec, dict, where)
    src, dst = _asm_ref(ws, spec.get("src"), where), _asm_ref(ws, spec.get("dst"), where)
    sn, dn = ws.asm_names[spec["src"]], ws.asm_names[spec["dst"]]
    mp = _require(spec.get("map"), dict, where + ".map")
    table = {sn.label(k, where): dn.label(v, where) for k, v in mp.items()}
    if set(table) != set(src.carrier):
        raise SchemaError(f"{where}: map must cover the source carrier")
    r = _term(ws, spec.get("realizer"), where + ".realizer")
    ws.morphisms[name] = A.AsmMorphism(src, dst, table, r, validate=False)


def _asm_ref(ws: Workspace, name: Any, where: str) -> A.Assembly:
    if name not in ws.assemblies:
        raise SchemaError(f"{where}: unknown assembly {name!r}")
    return ws.assemblies[name]


def _g_ref(ws: Workspace, name: Any, where: str) -> grpd.GroupoidAssembly:
    if not isinstance(name, str) or name not in ws.groupoids:
        raise SchemaError(f"{where}: unknown groupoid {name!r}")
    return ws.groupoids[name]


def _f_ref(ws: Workspace, name: Any, where: str) -> grpd.GFunctor:
    if not isinstance(name, str) or name not in ws.functors:
        raise SchemaError(f"{where}: unknown functor {name!r}")
    return ws.functors[name]


def _load_groupoid(ws: Workspace, name: str, spec: Any) -> None:
    where = f"groupoids.{name}"
    _require(spec, dict, where)
    try:
        if "builtin" in spec:
            which = spec["builtin"]
            builders: dict[str, Callable[[], grpd.GroupoidAssembly]] = {
                "interval": grpd.interval, "terminal": grpd.terminal_groupoid}
            if which not in builders:
                raise SchemaError(f"{where}: unknown builtin {which!r}")
            G = builders[which]()
        elif "cyclic" in spec:
            G = grpd.cyclic_group(_require(spec["cyclic"], int, where + ".cyclic"))
        elif "discrete" in spec:
            G = grpd.discrete(_require(spec["discrete"], list, where), name=name)
        elif "codiscrete" in spec:
            G = grpd.codiscrete(_require(spec["codiscrete"], list, where), name=name)
        elif "components" in spec:
            comps = []
            for c in _require(spec["components"], list, where):
                objs, order = _pair_of(c, where + ".components")
                comps.append((list(_require(objs, list, where)), _require(order, int, where)))
            G = grpd.groupoid_from_components(comps, name=name)
        elif "tables" in spec:
            G = _load_tables(ws, spec["tables"], where + ".tables", name)
        elif "objects" in spec:
            G = _load_explicit(ws, spec, where, name)
        else:
            raise SchemaError(f"{where}: unknown groupoid form")
    except grpd.GroupoidLawError as e:
        raise SchemaError(f"{where}: {e}") from None
    ws.groupoids[name] = G
    ws.obj_names[name] = Names.of(G.objects)
    ws.mor_names[name] = Names.of(G.morphisms)


def _load_tables(ws: Workspace, t: Any, where: str, name: str) -> grpd.GroupoidAssembly:
    _require(t, dict, where)
    objs = list(_require(t.get("objects"), list, where + ".objects"))
    mors = _require(t.get("morphisms"), dict, where + ".morphisms")
    dom, cod = {}, {}
    for m, ends in mors.items():
        d, c = _pair_of(ends, f"{where}.morphisms.{m}")
        if d not in objs or c not in objs:
            raise SchemaError(f"{where}.morphisms.{m}: unknown endpoint")
        dom[m], cod[m] = d, c
    comp = {}
    for row in _require(t.get("comp"), list, where + ".comp"):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError(f"{where}.comp: rows are [first, second, composite]")
        f, g, h = row
        comp[(g, f)] = h
    tags = t.get("obj_tags")
    obj_tags = None
    if tags is not None:
        obj_tags = {x: [_term(ws, e, f"{where}.obj_tags.{x}") for e in _require(v, list, where)]
                    for x, v in _require(tags, dict, where + ".obj_tags").items()}
    return grpd.tabulate(objs, list(mors), dom, cod, comp, t.get("ident"), t.get("inv"), obj_tags=obj_tags,
                         name=name)


def _entries(raw: Any, where: str) -> dict:
    """Objects or morphisms as a name-keyed dict in carrier order.  Lists of
    ``{"name": ...}`` entries keep the order that decoders index by."""
    if isinstance(raw, dict):
        return raw
    out: dict = {}
    for i, e in enumerate(_require(raw, list, where)):
        n = _require(e, dict, f"{where}[{i}]").get("name")
        if not isinstance(n, str) or n in out:
            raise SchemaError(f"{where}[{i}]: missing or repeated name")
        out[n] = e
    return out


def _load_explicit(ws: Workspace, spec: dict, where: str, name: str) -> grpd.GroupoidAssembly:
    objs = _entries(spec["objects"], where + ".objects")
    mors = _entries(spec.get("morphisms"), where + ".morphisms")
    o_real, o_wit, m_real, m_wit, dom, cod = {}, {}, {}, {}, {}, {}
    for x, e in objs.items():
        _require(e, dict, f"{where}.objects.{x}")
        o_real[x] = _rset(ws, e.get("real"), f"{where}.objects.{x}.real")
        if "witness" in e:
            o_wit[x] = _term(ws, e["witness"], f"{where}.objects.{x}.witness")
    for m, e in mors.items():
        _require(e, dict, f"{where}.morphisms.{m}")
        if e.get("dom") not in objs or e.get("cod") not in objs:
            raise SchemaError(f"{where}.morphisms.{m}: unknown endpoint")
        dom[m], cod[m] = e["dom"], e["cod"]
        m_real[m] = _rset(ws, e.get("real"), f"{where}.morphisms.{m}.real")
        if "witness" in e:
            m_wit[m] = _term(ws, e["witness"], f"{where}.morphisms.{m}.witness")
    comp = {}
    for row in _require(spec.get("comp"), list, where + ".comp"):
        if not isinstance(row, list) or len(row) != 3:
            raise SchemaError(f"{where}.comp: rows are [first, second, composite]")
        f, g, h = row
        comp[(g, f)] = h
    ident = _require(spec.get("ident"), dict, where + ".ident")
    inv = _require(spec.get("inv"), dict, where + ".inv")
    rs = _require(spec.get("realizers"), dict, where + ".realizers")
    try:
        r = grpd.StructureRealizers(*[_term(ws, rs.get(k), f"{where}.realizers.{k}")
                                      for k in ("dom", "cod", "id", "comp", "inv")])
    except TypeError:
        raise SchemaError(f"{where}.realizers: need dom, cod, id, comp, inv") from None
    dec = {k: _term(ws, spec[k], f"{where}.{k}") if spec.get(k) is not None else None
           for k in ("obj_dec", "mor_dec")}
    try:
        O = A.Assembly(list(objs), o_real, lambda x: o_wit[x] if x in o_wit else _first(o_real[x], where, x))
        M = A.Assembly(list(mors), m_real, lambda m: m_wit[m] if m in m_wit else _first(m_real[m], where, m))
    except A.AssemblyError as e:
        raise SchemaError(f"{where}: {e}") from None
    missing = [x for x in objs if x not in ident] + [m for m in mors if m not in inv]
    if missing:
        raise SchemaError(f"{where}: ident/inv tables miss {missing[0]!r}")
    return grpd.GroupoidAssembly(O, M, dom, cod, ident, comp, inv, r, dec["obj_dec"], dec["mor_dec"], name=name)


def _load_functor(ws: Workspace, name: str, spec: Any) -> None:
    where = f"functors.{name}"
    _require(spec, dict, where)
    X, Y = _g_ref(ws, spec.get("src"), where + ".src"), _g_ref(ws, spec.get("dst"), where + ".dst")
    xo, xm = ws.obj_names[spec["src"]], ws.mor_names[spec["src"]]
    yo, ym = ws.obj_names[spec["dst"]], ws.mor_names[spec["dst"]]
    ob = {xo.label(k, where + ".ob"): yo.label(v, where + ".ob")
          for k, v in _require(spec.get("ob"), dict, where + ".ob").items()}
    mor = {xm.label(k, where + ".mor"): ym.label(v, where + ".mor")
           for k, v in _require(spec.get("mor", {}), dict, where + ".mor").items()}
    miss = [x for x in X.objects if x not in ob] + [m for m in X.morphisms if m not in mor]
    if miss:
        raise SchemaError(f"{where}: no image for {label_name(miss[0])!r}")
    r_o = _term(ws, spec["r_o"], where + ".r_o") if spec.get("r_o") is not None else None
    r_m = _term(ws, spec["r_m"], where + ".r_m") if spec.get("r_m") is not None else None
    # functor laws are not enforced here: check/report name the broken equation
    ws.functors[name] = grpd.GFunctor(X, Y, ob, mor, r_o, r_m, check=False, name=name)
    extra: dict = {}
    if "regeq" in spec:
        w = _require(spec["regeq"], dict, where + ".regeq")
        extra["regeq"] = ho.RegEqWitness(*[_term(ws, w.get(k), f"{where}.regeq.{k}") for k in ("ess", "ful", "fai")])
    if "sds" in spec:
        extra["sds"] = spec["sds"]
    ws.functor_extra[name] = extra


def _load_sds(ws: Workspace, name: str) -> fib.SDSData | None:
    raw = ws.functor_extra.get(name, {}).get("sds")
    if raw is None:
        return None
    where = f"functors.{name}.sds"
    _require(raw, dict, where)
    j = ws.functors[name]
    r = _f_ref(ws, raw.get("retraction"), where + ".retraction")
    bn, bm = ws.obj_names[ws.groupoid_name(j.dst)], ws.mor_names[ws.groupoid_name(j.dst)]
    beta = {bn.label(k, where): bm.label(v, where) for k, v in _require(raw.get("beta"), dict, where).items()}
    return fib.SDSData(r, beta)


def _load_poly(ws: Workspace, name: str, spec: Any) -> None:
    where = f"polys.{name}"
    _require(spec, dict, where)
    try:
        ws.polys[name] = wset.PolySpec(
            _require(spec.get("X", []), list, where + ".X"), _require(spec.get("Y"), list, where + ".Y"),
            _require(spec.get("f", {}), dict, where + ".f"), spec.get("g"), spec.get("h"), spec.get("Z"))
    except ValueError as e:
        raise SchemaError(f"{where}: {e}") from None


def load_workspace(doc: Any) -> Workspace:
    _require(doc, dict, "document")
    bad = [k for k in doc if k not in SECTIONS + INFO_SECTIONS]
    if bad:
        raise SchemaError(f"document: unknown section {bad[0]!r}")
    ws = Workspace(doc)
    seen: dict[str, str] = {}
    for sec in SECTIONS:
        for n in _require(doc.get(sec, {}), dict, sec):
            if n in seen:
                raise SchemaError(f"{sec}.{n}: name already used in {seen[n]}")
            seen[n] = sec
    _load_terms(ws, doc.get("terms", {}))
    for n, s in doc.get("assemblies", {}).items():
        _load_assembly(ws, n, s)
    for n, s in doc.get("morphisms", {}).items():
        _load_morphism(ws, n, s)
    for n, s in doc.get("groupoids", {}).items():
        _load_groupoid(ws, n, s)
    for n, s in doc.get("functors", {}).items():
        _load_functor(ws, n, s)
    for n, s in doc.get("polys", {}).items():
        _load_poly(ws, n, s)
    return ws


def read_workspace(path: str) -> Workspace:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None
    return load_workspace(doc)


# ---------------------------------------------------------------- writing

class Writer:
    """Accumulates new bindings on top of a copy of the input document."""

    def __init__(self, ws: Workspace) -> None:
        self.ws = ws
        self.doc = copy.deepcopy(ws.doc)
        self.gnames: dict[int, str] = {id(G): n for n, G in ws.groupoids.items()}
        self.names: dict[str, tuple[Names, Names]] = {n: (ws.obj_names[n], ws.mor_names[n]) for n in ws.groupoids}
        self.anames: dict[int, tuple[str, Names]] = {id(a): (n, ws.asm_names[n]) for n, a in ws.assemblies.items()}

    def _put(self, sec: str, name: str, value: Any) -> None:
        taken = any(name in self.doc.get(s, {}) for s in SECTIONS)
        if taken:
            raise SchemaError(f"output name {name!r} is already bound")
        self.doc.setdefault(sec, {})[name] = value

    def assembly(self, name: str, X: A.Assembly) -> str:
        if id(X) in self.anames:
            return self.anames[id(X)][0]
        nm = Names.of(X.carrier)
        self._put("assemblies", name, {
            "points": {nm.to_name[p]: dump_rset(X.real(p)) for p in X.carrier},
            "witness": {nm.to_name[p]: show(X.witness(p)) for p in X.carrier},
        })
        self.anames[id(X)] = (name, nm)
        return name

    def morphism(self, name: str, m: A.AsmMorphism, src: str, dst: str) -> None:
        sn, dn = self.anames[id(m.src)][1], self.anames[id(m.dst)][1]
        self._put("morphisms", name, {
            "src": src, "dst": dst, "realizer": show(m.realizer),
            "map": {sn.to_name[x]: dn.to_name[m.map[x]] for x in m.src.carrier},
        })

    def groupoid(self, name: str, G: grpd.GroupoidAssembly) -> str:
        if id(G) in self.gnames:
            return self.gnames[id(G)]
        on, mn = Names.of(G.objects), Names.of(G.morphisms)
        r = G.realizers
        comp = [[mn.to_name[f], mn.to_name[g], mn.to_name[h]] for (g, f), h in G.comp.items()]
        self._put("groupoids", name, {
            "objects": [{"name": on.to_name[x], "real": dump_rset(G.obj.real(x)), "witness": show(G.obj.witness(x))}
                        for x in G.objects],
            "morphisms": [{"name": mn.to_name[m], "dom": on.to_name[G.dom[m]], "cod": on.to_name[G.cod[m]],
                           "real": dump_rset(G.mor.real(m)), "witness": show(G.mor.witness(m))}
                          for m in G.morphisms],
            "comp": comp,
            "ident": {on.to_name[x]: mn.to_name[G.ident[x]] for x in G.objects},
            "inv": {mn.to_name[m]: mn.to_name[G.inv[m]] for m in G.morphisms},
            "realizers": {"dom": show(r.dom), "cod": show(r.cod), "id": show(r.id), "comp": show(r.comp),
                          "inv": show(r.inv)},
            "obj_dec": show(G.obj_dec) if G.obj_dec is not None else None,
            "mor_dec": show(G.mor_dec) if G.mor_dec is not None else None,
        })
        self.gnames[id(G)] = name
        self.names[name] = (on, mn)
        return name

    def functor(self, name: str, F: grpd.GFunctor, extra: dict | None = None) -> None:
        src, dst = self.gnames[id(F.src)], self.gnames[id(F.dst)]
        (so, sm), (do, dm) = self.names[src], self.names[dst]
        body = {
            "src": src, "dst": dst,
            "ob": {so.to_name[x]: do.to_name[F.ob[x]] for x in F.src.objects},
            "mor": {sm.to_name[m]: dm.to_name[F.mor[m]] for m in F.src.morphisms},
            "r_o": show(F.r_o) if F.r_o is not None else None,
            "r_m": show(F.r_m) if F.r_m is not None else None,
        }
        body.update(extra or {})
        self._put("functors", name, body)

    def verification(self, name: str, verdict: Tri | bool) -> None:
        if isinstance(verdict, bool):
            verdict = yes() if verdict else no()
        self.doc.setdefault("verification", {})[name] = _verdict_word(verdict)

    def text(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _verdict_word(t: Tri) -> str:
    return "YES" if t.is_yes else "NO" if t.is_no else "UNKNOWN"


# ---------------------------------------------------------------- settings

@dataclass
class Settings:
    fuel: int | None
    budget: int
    fuel_source: str
    budget_source: str

    @property
    def eval_fuel(self) -> int:
        return self.fuel if self.fuel is not None else DEFAULT_FUEL


def _settings(args: argparse.Namespace) -> Settings:
    def pick(flag: int | None, env: str, default: int | None) -> tuple[int | None, str]:
        if flag is not None:
            return flag, "flag"
        raw = os.environ.get(env)
        if raw is not None:
            try:
                v = int(raw)
            except ValueError:
                raise SchemaError(f"{env} must be an integer, got {raw!r}") from None
            if v <= 0:
                raise SchemaError(f"{env} must be positive")
            return v, "env"
        return default, "default"

    fuel, fs = pick(args.fuel, "GRPDASM_FUEL", None)
    budget, bs = pick(args.budget, "GRPDASM_BUDGET", DEFAULT_BUDGET)
    return Settings(fuel, budget, fs, bs)


# ---------------------------------------------------------------- checks

def _tri_from_list(failures: list[str]) -> Tri:
    return no(failures[0], failures) if failures else yes()


def run_check(ws: Workspace, target: str, check: str, st: Settings) -> Tri:
    kind = ws.kind(target)
    if kind is None:
        raise SchemaError(f"no binding named {target!r}")

    def need(*kinds: str) -> None:
        if kind not in kinds:
            raise SchemaError(f"check {check} needs a binding in {'/'.join(kinds)}, {target!r} is in {kind}")

    fuel = st.fuel
    if check == "morphism":
        need("morphisms")
        return A.check_morphism(ws.morphisms[target], fuel or DEFAULT_FUEL)
    if check == "groupoid":
        need("groupoids")
        G = ws.groupoids[target]
        laws = grpd.law_failures(G)
        if laws:
            return no(laws[0][0], [m for m, _ in laws])
        return G.check_realizers(fuel)
    if check == "functor":
        need("functors")
        F = ws.functors[target]
        bad = grpd.functor_failures(F)
        if bad:
            return no(bad[0], bad)
        return F.check_realizers(fuel)
    if check == "fibration":
        need("functors")
        F = ws.functors[target]
        bad = grpd.functor_failures(F)
        if bad:
            return no(bad[0], bad)
        fw = fib.find_normal_isofib(F)
        if fw is None:
            return no("no choice of lifts makes it a normal isofibration")
        return _tri_from_list(fw.failures())
    if check == "sds":
        need("functors")
        j = ws.functors[target]
        bad = grpd.functor_failures(j)
        if bad:
            return no(bad[0], bad)
        data = _load_sds(ws, target) or fib.find_sds(j)
        if data is None:
            return no("no retraction with a strong deformation exists")
        return _tri_from_list(fib.verify_sds(j, data).failures)
    if check == "regeq":
        need("functors", "groupoids")
        if kind == "groupoids":
            F, w = ho.atom(ws.groupoids[target])
            return ho.verify_regular_equivalence(F, w, fuel)
        F = ws.functors[target]
        bad = grpd.functor_failures(F)
        if bad:
            return no(bad[0], bad)
        w = ws.functor_extra.get(target, {}).get("regeq")
        if w is None:
            data = ho.find_equivalence(F, st.budget)
            if not data:
                if data.carrier_level:
                    return no(data.reason)
                return unknown(data.reason)
            w = ho.equivalence_witness(data)
        return ho.verify_regular_equivalence(F, w, fuel)
    if check in ("zero-type", "neg-one-type", "discrete"):
        need("groupoids")
        pred = {"zero-type": ho.is_zero_type, "neg-one-type": ho.is_neg_one_type, "discrete": ho.is_discrete}[check]
        return yes() if pred(ws.groupoids[target]) else no(f"{target} is not {check}")
    if check == "modest":
        need("groupoids", "assemblies")
        if kind == "assemblies":
            return A.is_modest(ws.assemblies[target], fuel or DEFAULT_FUEL)
        G = ws.groupoids[target]
        objs = A.is_modest(G.obj, fuel or G.fuel)
        return A.is_modest(G.mor, fuel or G.fuel) if objs.is_yes else objs
    raise SchemaError(f"unknown check {check!r}")


# ---------------------------------------------------------------- builds

def _binding(ws: Workspace, name: str, *kinds: str) -> tuple[str, Any]:
    kind = ws.kind(name)
    if kind not in kinds:
        raise SchemaError(f"{name!r} must be one of {'/'.join(kinds)}")
    return kind, getattr(ws, kind)[name]


def _nargs(args: list[str], n: int, recipe: str) -> None:
    if len(args) != n:
        raise SchemaError(f"build {recipe} takes {n} argument(s), got {len(args)}")


def run_build(ws: Workspace, recipe: str, args: list[str], st: Settings, opts: argparse.Namespace) -> Writer:
    w = Writer(ws)
    tag = opts.name
    if recipe in ("product", "coproduct"):
        _nargs(args, 2, recipe)
        k1, a = _binding(ws, args[0], "assemblies", "groupoids")
        k2, b = _binding(ws, args[1], "assemblies", "groupoids")
        if k1 != k2:
            raise SchemaError(f"{recipe} needs two assemblies or two groupoids")
        base = tag or f"{args[0]}_{'x' if recipe == 'product' else 'plus'}_{args[1]}"
        if k1 == "assemblies":
            res = (A.product if recipe == "product" else A.coproduct)(a, b)
            w.assembly(base, res.assembly)
            maps = ("pr0", "pr1") if recipe == "product" else ("inl", "inr")
            for m in maps:
                mm = getattr(res, m)
                w.morphism(f"{m}_{base}", mm, w.anames[id(mm.src)][0], w.anames[id(mm.dst)][0])
        else:
            res = (grpd.product if recipe == "product" else grpd.coproduct)(a, b)
            w.groupoid(base, res.groupoid)
            for m in (("pr0", "pr1") if recipe == "product" else ("inl", "inr")):
                w.functor(f"{m}_{base}", getattr(res, m))
            w.verification(f"{base}.realizers", res.groupoid.check_realizers(st.fuel))
        return w
    if recipe == "equalizer":
        _nargs(args, 2, recipe)
        k1, f = _binding(ws, args[0], "morphisms", "functors")
        k2, g = _binding(ws, args[1], "morphisms", "functors")
        if k1 != k2:
            raise SchemaError("equalizer needs two morphisms or two functors")
        base = tag or f"eq_{args[0]}_{args[1]}"
        try:
            res = A.equalizer(f, g) if k1 == "morphisms" else grpd.equalizer(f, g)
        except (ValueError, grpd.FunctorError) as e:
            raise SchemaError(f"equalizer: {e}") from None
        if k1 == "morphisms":
            w.assembly(base, res.assembly)
            w.morphism(f"incl_{base}", res.incl, base, w.anames[id(res.incl.dst)][0])
        else:
            w.groupoid(base, res.groupoid)
            w.functor(f"incl_{base}", res.incl)
        return w
    if recipe == "coequalizer":
        _nargs(args, 2, recipe)
        _, f = _binding(ws, args[0], "morphisms")
        _, g = _binding(ws, args[1], "morphisms")
        base = tag or f"coeq_{args[0]}_{args[1]}"
        try:
            res = A.coequalizer(f, g)
        except ValueError as e:
            raise SchemaError(f"coequalizer: {e}") from None
        w.assembly(base, res.assembly)
        w.morphism(f"quot_{base}", res.quotient, w.anames[id(res.quotient.src)][0], base)
        return w
    if recipe == "partitioning":
        _nargs(args, 1, recipe)
        _, X = _binding(ws, args[0], "assemblies")
        base = tag or f"part_{args[0]}"
        res = A.partitioning(X)
        w.assembly(base, res.assembly)
        w.morphism(f"pr_{base}", res.pr, base, args[0])
        w.verification(f"pr_{base}.regular_epi", A.is_regular_epi(res.pr, budget=st.budget).verdict)
        return w
    if recipe == "part":
        _nargs(args, 1, recipe)
        _, G = _binding(ws, args[0], "groupoids")
        base = tag or f"part_{args[0]}"
        P = ho.part(G)
        F, wit = ho.atom(G, P)
        w.groupoid(base, P)
        w.functor(f"atom_{args[0]}", F, {"regeq": {"ess": show(wit.ess), "ful": show(wit.ful), "fai": show(wit.fai)}})
        w.verification(f"atom_{args[0]}.regeq", ho.verify_regular_equivalence(F, wit, st.fuel))
        return w
    if recipe == "clus":
        _nargs(args, 1, recipe)
        _, G = _binding(ws, args[0], "groupoids")
        base = tag or f"clus_{args[0]}"
        fam = []
        for i, U in enumerate(_require(json.loads(opts.family), list, "--family")):
            fam.append(tuple(_term(ws, t, f"--family[{i}]") for t in _require(U, list, "--family")))
        try:
            C = ho.clus_fin(G, ho.ClusSpec(tuple(fam)), budget=st.budget)
        except ValueError as e:
            raise SchemaError(f"clus: {e}") from None
        w.groupoid(base, C)
        w.verification(f"{base}.realizers", C.check_realizers(st.fuel))
        return w
    if recipe == "comma":
        _nargs(args, 1, recipe)
        _, F = _binding(ws, args[0], "functors")
        _laws_or_fail(F, args[0])
        base = tag or f"comma_{args[0]}"
        cf = fib.comma_factorize(F)
        w.groupoid(base, cf.comma)
        w.functor(f"tilde_{args[0]}", cf.tilde, {"sds": {
            "retraction": f"retraction_{args[0]}",
            "beta": {w.names[base][0].to_name[x]: w.names[base][1].to_name[m] for x, m in cf.sds.beta.items()}}})
        w.functor(f"hat_{args[0]}", cf.hat)
        w.functor(f"retraction_{args[0]}", cf.sds.retraction)
        w.verification(f"{base}.factorizes", cf.hat.compose(cf.tilde).key == F.key)
        w.verification(f"hat_{args[0]}.fibration", not cf.witness.failures())
        w.verification(f"tilde_{args[0]}.sds", fib.verify_sds(cf.tilde, cf.sds).ok)
        return w
    if recipe == "exponential":
        _nargs(args, 2, recipe)
        _, X = _binding(ws, args[0], "groupoids")
        _, Y = _binding(ws, args[1], "groupoids")
        base = tag or f"exp_{args[0]}_{args[1]}"
        ex = grpd.exponential(X, Y)
        w.groupoid(base, ex.groupoid)
        w.groupoid(f"{base}_x_{args[0]}", ex.domain.groupoid)
        w.functor(f"app_{base}", ex.app)
        return w
    if recipe == "path-object":
        _nargs(args, 1, recipe)
        _, X = _binding(ws, args[0], "groupoids")
        base = tag or f"path_{args[0]}"
        po = grpd.path_object(X)
        w.groupoid(base, po.groupoid)
        w.groupoid(f"{base}_square", po.square.groupoid)
        for m in ("d0", "d1", "sigma", "boundary"):
            w.functor(f"{m}_{base}", getattr(po, m))
        fw = fib.find_normal_isofib(po.boundary)
        w.verification(f"boundary_{base}.fibration", fw is not None and not fw.failures())
        return w
    if recipe == "interval":
        _nargs(args, 0, recipe)
        w.groupoid(tag or "interval", grpd.interval())
        return w
    if recipe == "dependent-product":
        _nargs(args, 2, recipe)
        _, F = _binding(ws, args[0], "functors")
        _, G = _binding(ws, args[1], "functors")
        _laws_or_fail(F, args[0])
        _laws_or_fail(G, args[1])
        fw = fib.find_normal_isofib(F)
        if fw is None:
            raise SchemaError(f"dependent-product: {args[0]} is not a normal isofibration")
        base = tag or f"pi_{args[0]}_{args[1]}"
        try:
            D = fib.dependent_product_fib(F, fw, G)
        except (ValueError, grpd.FunctorError) as e:
            raise SchemaError(f"dependent-product: {e}") from None
        w.groupoid(base, D.groupoid)
        w.functor(f"proj_{base}", D.proj)
        return w
    if recipe in ("truncate0", "truncate-neg1"):
        _nargs(args, 1, recipe)
        _, X = _binding(ws, args[0], "groupoids")
        base = tag or f"{recipe.replace('-', '_')}_{args[0]}"
        T, unit = (ho.truncate0 if recipe == "truncate0" else ho.truncate_neg1)(X)
        w.groupoid(base, T)
        w.functor(f"unit_{base}", unit)
        pred = ho.is_zero_type if recipe == "truncate0" else ho.is_neg_one_type
        w.verification(f"{base}.{'zero' if recipe == 'truncate0' else 'neg_one'}_type", pred(T))
        return w
    if recipe == "wtrees":
        _nargs(args, 1, recipe)
        _, spec = _binding(ws, args[0], "polys")
        if opts.depth < 1:
            raise SchemaError("--depth must be at least 1")
        trees = wset.enumerate_trees(spec, opts.depth, limit=opts.limit)
        counts = [sum(1 for t in trees if t.depth <= d) for d in range(1, opts.depth + 1)]
        out: dict = {"depth": opts.depth, "counts": counts, "trees": [repr(t) for t in trees]}
        if spec.dependent:
            kept = wset.filter_fgh(spec, trees)
            out["fgh"] = [[repr(t), label_name(z)] for t, z in kept]
        w.doc.setdefault("wtrees", {})[tag or args[0]] = out
        return w
    raise SchemaError(f"unknown recipe {recipe!r}")


def _laws_or_fail(F: grpd.GFunctor, name: str) -> None:
    bad = grpd.functor_failures(F, first_only=True)
    if bad:
        raise SchemaError(f"{name} is not a functor: {bad[0]}")


# ---------------------------------------------------------------- report

def run_report(ws: Workspace, st: Settings) -> tuple[list[str], Tri]:
    lines = ["grpdasm report",
             f"fuel: {st.fuel if st.fuel is not None else DEFAULT_FUEL} ({st.fuel_source})",
             f"budget: {st.budget} ({st.budget_source})"]
    verdicts: list[Tri] = []

    def line(t: Tri, what: str, detail: str) -> None:
        verdicts.append(t)
        word = "PASS" if t.is_yes else "FAIL" if t.is_no else "UNKNOWN"
        lines.append(f"{word} {what}: {detail}")

    for n in sorted(ws.terms):
        out = evaluate(ws.terms[n], st.eval_fuel)
        if isinstance(out, Normal):
            line(yes(), f"terms.{n}", f"normal form {show(out.result)}")
        else:
            line(unknown("fuel"), f"terms.{n}", "no normal form within fuel")
    for n in sorted(ws.assemblies):
        X = ws.assemblies[n]
        line(yes(), f"assemblies.{n}",
             f"{_count(len(X), 'point')}, modest {_verdict_word(A.is_modest(X))}, "
             f"partitioned {_verdict_word(A.is_partitioned(X))}")
    for n in sorted(ws.morphisms):
        t = A.check_morphism(ws.morphisms[n], st.eval_fuel)
        line(t, f"morphisms.{n}", "realizer tracks the map" if t.is_yes else _reason(t))
    for n in sorted(ws.groupoids):
        G = ws.groupoids[n]
        t = G.check_realizers(st.fuel)
        props = ", ".join(f"{k} {'yes' if p(G) else 'no'}" for k, p in
                          (("zero-type", ho.is_zero_type), ("neg-one-type", ho.is_neg_one_type),
                           ("discrete", ho.is_discrete)))
        line(t, f"groupoids.{n}",
             f"{_count(len(G.objects), 'object')}, {_count(len(G.morphisms), 'morphism')}, {props}"
             if t.is_yes else _reason(t))
    for n in sorted(ws.functors):
        F = ws.functors[n]
        bad = grpd.functor_failures(F, first_only=True)
        if bad:
            line(no(bad[0]), f"functors.{n}", bad[0])
            continue
        t = F.check_realizers(st.fuel)
        line(t, f"functors.{n}", "functor laws and realizers hold" if t.is_yes else _reason(t))
    for n in sorted(ws.polys):
        spec = ws.polys[n]
        counts = [wset.count_trees(spec, d) for d in (1, 2, 3)]
        line(yes(), f"polys.{n}", f"trees up to depth 1..3: {counts}")
    worst = next((v for v in verdicts if v.is_no), None)
    if worst is None:
        worst = next((v for v in verdicts if v.is_unknown), yes())
    return lines, worst


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}{'' if n == 1 else 's'}"


def _reason(t: Tri) -> str:
    return t.reason or _verdict_word(t)


# ---------------------------------------------------------------- main

class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # usage errors use exit code 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=None, help="evaluation fuel (env GRPDASM_FUEL)")
    common.add_argument("--budget", type=int, default=None, help="search budget, a term size (env GRPDASM_BUDGET)")
    p = _Parser(prog="grpdasm", description="Realizability groupoid assemblies at desk scale.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    e = sub.add_parser("eval", parents=[common], help="normalize a term")
    e.add_argument("term")
    c = sub.add_parser("check", parents=[common], help="verify a property of a binding")
    c.add_argument("workspace")
    c.add_argument("target")
    c.add_argument("check", choices=CHECKS)
    b = sub.add_parser("build", parents=[common], help="run a construction and write a document")
    b.add_argument("workspace")
    b.add_argument("recipe", choices=RECIPES)
    b.add_argument("args", nargs="*")
    b.add_argument("-o", "--output", help="output file (default: stdout)")
    b.add_argument("--name", help="name for the main result binding")
    b.add_argument("--depth", type=int, default=3, help="wtrees: maximal depth")
    b.add_argument("--limit", type=int, default=100_000, help="wtrees: maximal number of trees")
    b.add_argument("--family", default='[["k"]]', help='clus: JSON list of term lists, e.g. [["k","s"]]')
    r = sub.add_parser("report", parents=[common], help="summarize a workspace")
    r.add_argument("workspace")
    return p


def _exit_for(t: Tri) -> int:
    return EXIT_OK if t.is_yes else EXIT_NO if t.is_no else EXIT_UNKNOWN


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        for flag in ("fuel", "budget"):
            v = getattr(args, flag)
            if v is not None and v <= 0:
                raise SchemaError(f"--{flag} must be positive")
        st = _settings(args)
        if args.cmd == "eval":
            t = _term(Workspace({}), args.term, "term")
            res = evaluate(t, st.eval_fuel)
            if isinstance(res, Normal):
                out.write(f"{show(res.result)}\nsteps: {res.steps}\n")
                return EXIT_OK
            out.write(f"OUT_OF_FUEL after {st.eval_fuel} steps\n")
            return EXIT_FUEL
        ws = read_workspace(args.workspace)
        if args.cmd == "check":
            verdict = run_check(ws, args.target, args.check, st)
            out.write(f"{_verdict_word(verdict)}{' (approximate)' if verdict.is_yes and verdict.approximate else ''}\n")
            if verdict.is_no:
                for f in (verdict.failures or (verdict.reason,)):
                    out.write(f"  - {f}\n")
            elif verdict.is_unknown:
                out.write(f"  - {verdict.reason}\n")
            return _exit_for(verdict)
        if args.cmd == "build":
            w = run_build(ws, args.recipe, list(args.args), st, args)
            text = w.text()
            if args.output:
                with open(args.output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                out.write(text)
            return EXIT_OK
        lines, worst = run_report(ws, st)
        out.write("\n".join(lines) + "\n")
        return _exit_for(worst)
    except SchemaError as e:
        sys.stderr.write(f"grpdasm: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
