"""Finite groupoid assemblies: internal groupoids whose object and morphism
parts are assemblies and whose structure maps are realized.

Carrier laws are checked exhaustively when a groupoid is built.  Realizer
obligations are checked on demand (``check_realizers``) because some of them
evaluate long lookup chains.

Composition is stored as a table ``comp[(g, f)] = g∘f`` for ``cod f = dom g``;
its realizer takes a pair in chain order, ``[r_f, r_g]``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .asm import Assembly, AsmMorphism, check_morphism
from . import asm as _asm
from .pca import (
    DEFAULT_FUEL, App, I, K, KBAR, P0, P1, Term, Var, ap, church, church_value, lam, lookup_combinator,
    mk_pair, nf, std, unpair,
)
from .rset import (
    CERT_INL, CERT_INR, Decided, Fin, Imp, PairOf, RealizerSet, Tri, conj, enumerate_set, unknown, NO, YES,
)

Label = Hashable

# ------------------------------------------------------------- term helpers

_PAIR = std("pair")
_IFTHEN = std("ifthen")


def _v(name: str) -> Var:
    return Var(name)


def _pair(a: Term, b: Term) -> Term:
    return ap(_PAIR, a, b)


def _p0(t: Term) -> Term:
    return App(P0, t)


def _p1(t: Term) -> Term:
    return App(P1, t)


def _decode(dec: Term | None, t: Term) -> Term:
    return t if dec is I else App(dec, t)


def table_map(dec: Term | None, table: Sequence[Term]) -> Term:
    """Realizer of a map out of an indexed assembly: ``λz. L(dec·z)`` where
    ``L`` looks the decoded index up in ``table``."""
    if dec is None:
        raise ValueError("source assembly carries no decoder")
    L = lookup_combinator(table)
    return L if dec is I else lam("z", App(L, App(dec, _v("z"))))


# ----------------------------------------------------------------- errors

def term_decoder(assign: Mapping[Term, int]) -> Term | None:
    """A term sending each key to ``church(assign[key])``, or ``None``.

    Keys must be built from numerals and pairs; the decoder reads a numeral
    with a lookup table and a pair by decoding its first component and then
    dispatching on it.  Behaviour on other terms is unspecified.
    """
    values = set(assign.values())
    if len(values) <= 1:
        return App(K, church(values.pop() if values else 0))
    nums = {t: church_value(t) for t in assign}
    if all(v is not None for v in nums.values()):
        width = max(nums.values()) + 1
        table = [I] * width
        for t, v in nums.items():
            table[v] = church(assign[t])
        return lookup_combinator(table)
    groups: dict[Term, dict[Term, int]] = {}
    for t, v in assign.items():
        pr = unpair(t)
        if pr is None:
            return None
        groups.setdefault(pr[0], {})[pr[1]] = v
    z = _v("z")
    subs = [term_decoder(g) for g in groups.values()]
    if any(d is None for d in subs):
        return None
    if len(subs) == 1:
        return lam("z", App(subs[0], _p1(z)))
    first = term_decoder({a: j for j, a in enumerate(groups)})
    if first is None:
        return None
    return lam("z", App(App(lookup_combinator(subs), App(first, _p0(z))), _p1(z)))


def infer_decoder(A: Assembly) -> Term | None:
    """Decoder for an assembly whose realizer sets are finite, disjoint and
    built from numerals and pairs."""
    assign: dict[Term, int] = {}
    for i, x in enumerate(A.carrier):
        items = enumerate_set(A.real(x))
        if items is None:
            return None
        for t in items:
            if assign.setdefault(t, i) != i:
                return None
    return term_decoder(assign)


class Key(tuple):
    """A tuple label that caches its hash; equal to the plain tuple."""

    def __hash__(self) -> int:
        try:
            return self._h
        except AttributeError:
            self._h = h = tuple.__hash__(self)
            return h


class GroupoidLawError(ValueError):
    """A carrier-level law failed; ``instance`` names the offending data."""

    def __init__(self, message: str, instance: tuple = ()) -> None:
        super().__init__(message)
        self.instance = instance


class FunctorError(ValueError):
    pass


# --------------------------------------------------------------- groupoids

@dataclass(frozen=True)
class StructureRealizers:
    dom: Term
    cod: Term
    id: Term
    comp: Term
    inv: Term


class GroupoidAssembly:
    """An internal groupoid in assemblies with finite carriers.

    ``obj_dec``/``mor_dec`` are optional decoders: terms sending every
    realizer of the i-th point (carrier order) to ``church(i)``.  Groupoids
    with both decoders count as *indexed*; maps out of them can be realized
    by lookup tables.
    """

    def __init__(self, obj: Assembly, mor: Assembly, dom: Mapping, cod: Mapping, ident: Mapping,
                 comp: Mapping, inv: Mapping,
                 realizers: StructureRealizers | Callable[[], StructureRealizers],
                 obj_dec: Term | None = None, mor_dec: Term | None = None, name: str = "",
                 check: bool = True) -> None:
        self.obj, self.mor = obj, mor
        self.dom = {m: dom[m] for m in mor.carrier}
        self.cod = {m: cod[m] for m in mor.carrier}
        self.ident = {x: ident[x] for x in obj.carrier}
        self.inv = {m: inv[m] for m in mor.carrier}
        self.comp = dict(comp)
        self._realizers = realizers
        self.obj_dec, self.mor_dec = obj_dec, mor_dec
        self.name = name
        self.out: dict[Label, list] = {x: [] for x in obj.carrier}
        self.into: dict[Label, list] = {x: [] for x in obj.carrier}
        self._homs: dict[tuple, list] = {}
        for m in mor.carrier:
            if self.dom[m] not in self.out or self.cod[m] not in self.into:
                raise GroupoidLawError(f"morphism {m!r} has an endpoint outside the objects", (m,))
            self.out[self.dom[m]].append(m)
            self.into[self.cod[m]].append(m)
            self._homs.setdefault((self.dom[m], self.cod[m]), []).append(m)
        self._id_set = frozenset(self.ident.values())
        if check:
            failures = law_failures(self, first_only=True)
            if failures:
                msg, inst = failures[0]
                raise GroupoidLawError(msg, inst)

    # -- carriers
    @property
    def objects(self) -> tuple:
        return self.obj.carrier

    @property
    def morphisms(self) -> tuple:
        return self.mor.carrier

    def hom(self, x: Label, y: Label) -> list:
        return self._homs.get((x, y), [])

    def compose(self, g: Label, f: Label) -> Label:
        return self.comp[(g, f)]

    def is_identity(self, m: Label) -> bool:
        return m in self._id_set

    def chain(self, ms: Sequence[Label]) -> Label:
        """Composite of a chain listed first-to-last."""
        out = ms[0]
        for m in ms[1:]:
            out = self.comp[(m, out)]
        return out

    # -- realizers
    @property
    def realizers(self) -> StructureRealizers:
        if callable(self._realizers):
            self._realizers = self._realizers()
        return self._realizers

    @property
    def indexed(self) -> bool:
        return self.obj_dec is not None and self.mor_dec is not None

    @property
    def fuel(self) -> int:
        """Fuel large enough for the lookup chains of this groupoid."""
        return max(DEFAULT_FUEL, 300 * (len(self.obj) + len(self.mor)) + 2_000)

    def composable_assembly(self) -> Assembly:
        """Composable pairs ``(f, g)`` (chain order) realized by ``[r_f, r_g]``."""
        pairs = [(f, g) for f in self.morphisms for g in self.out[self.cod[f]]]
        return Assembly(pairs, lambda p: PairOf(self.mor.real(p[0]), self.mor.real(p[1])),
                        lambda p: mk_pair(self.mor.witness(p[0]), self.mor.witness(p[1])))

    def structure_maps(self) -> dict[str, AsmMorphism]:
        r = self.realizers
        C = self.composable_assembly()
        return {
            "dom": AsmMorphism(self.mor, self.obj, self.dom, r.dom, validate=False),
            "cod": AsmMorphism(self.mor, self.obj, self.cod, r.cod, validate=False),
            "id": AsmMorphism(self.obj, self.mor, self.ident, r.id, validate=False),
            "inv": AsmMorphism(self.mor, self.mor, self.inv, r.inv, validate=False),
            "comp": AsmMorphism(C, self.mor, {p: self.comp[(p[1], p[0])] for p in C.carrier}, r.comp,
                                validate=False),
        }

    def check_realizers(self, fuel: int | None = None) -> Tri:
        fuel = fuel or self.fuel
        verdicts = []
        for name, m in self.structure_maps().items():
            v = check_morphism(m, fuel)
            if not v.is_yes:
                v = v.with_failures([f"{name}: {f}" for f in v.failures]) if v.is_no else v
            verdicts.append(v)
        return conj(verdicts)

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"GroupoidAssembly{tag}({len(self.obj)} objects, {len(self.mor)} morphisms)"


def law_failures(G: GroupoidAssembly, first_only: bool = False) -> list[tuple[str, tuple]]:
    """Every violated category/groupoid law instance on the carriers."""
    out: list[tuple[str, tuple]] = []

    def bad(msg: str, inst: tuple) -> bool:
        out.append((msg, inst))
        return first_only

    dom, cod, comp = G.dom, G.cod, G.comp
    for x in G.objects:
        e = G.ident[x]
        if e not in G.mor or dom[e] != x or cod[e] != x:
            if bad(f"identity of {x!r} is not an endomorphism of it", (x, e)):
                return out
    expected = 0
    for f in G.morphisms:
        for g in G.out[cod[f]]:
            expected += 1
            h = comp.get((g, f))
            if h is None or h not in G.mor:
                if bad(f"composite {g!r}∘{f!r} missing", (g, f)):
                    return out
                continue
            if dom[h] != dom[f] or cod[h] != cod[g]:
                if bad(f"composite {g!r}∘{f!r} = {h!r} has wrong endpoints", (g, f, h)):
                    return out
    if len(comp) != expected:
        extra = [k for k in comp if not (k[1] in G.mor and k[0] in G.mor and cod[k[1]] == dom[k[0]])]
        if extra and bad(f"composition defined on a non-composable pair {extra[0]!r}", tuple(extra[0])):
            return out
    if out:
        return out
    for f in G.morphisms:
        if comp[(G.ident[cod[f]], f)] != f:
            if bad(f"left unit fails at {f!r}", (G.ident[cod[f]], f)):
                return out
        if comp[(f, G.ident[dom[f]])] != f:
            if bad(f"right unit fails at {f!r}", (f, G.ident[dom[f]])):
                return out
        v = G.inv[f]
        if v not in G.mor or dom[v] != cod[f] or cod[v] != dom[f]:
            if bad(f"inverse of {f!r} has wrong endpoints", (f, v)):
                return out
            continue
        if comp[(v, f)] != G.ident[dom[f]] or comp[(f, v)] != G.ident[cod[f]]:
            if bad(f"inverse law fails at {f!r}", (f, v)):
                return out
    # associativity over integer indices: the cubic loop dominates for large tables
    mors = G.morphisms
    ix = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    out_ix = [[ix[g] for g in G.out[cod[f]]] for f in mors]
    table = {ix[g] * n + ix[f]: ix[h] for (g, f), h in comp.items()}
    for fi in range(n):
        for gi in out_ix[fi]:
            gf = table[gi * n + fi]
            for hi in out_ix[gi]:
                if table[hi * n + gf] != table[table[hi * n + gi] * n + fi]:
                    h, g, f = mors[hi], mors[gi], mors[fi]
                    if bad(f"associativity fails at ({h!r}, {g!r}, {f!r})", (h, g, f)):
                        return out
    return out


def _infer_identities(objects, morphisms, dom, cod, comp) -> dict:
    ident = {}
    for x in objects:
        cands = [m for m in morphisms if dom[m] == x and cod[m] == x and comp.get((m, m)) == m]
        if len(cands) != 1:
            raise GroupoidLawError(f"cannot find a unique identity for {x!r}", (x,))
        ident[x] = cands[0]
    return ident


def _infer_inverses(morphisms, dom, cod, comp, ident) -> dict:
    inv = {}
    for m in morphisms:
        cands = [v for v in morphisms if dom[v] == cod[m] and cod[v] == dom[m]
                 and comp.get((v, m)) == ident[dom[m]]]
        if not cands:
            raise GroupoidLawError(f"{m!r} has no inverse", (m,))
        inv[m] = cands[0]
    return inv


def tabulate(objects: Iterable[Label], morphisms: Iterable[Label], dom: Mapping, cod: Mapping,
             comp: Mapping | Callable, ident: Mapping | None = None, inv: Mapping | None = None,
             obj_tags: Mapping[Label, Sequence[Term]] | None = None,
             mor_tags: Mapping[Label, Sequence[Term]] | None = None, name: str = "",
             check: bool = True) -> GroupoidAssembly:
    """Church-indexed groupoid assembly from finite tables.

    By default object ``i`` is realized by ``{church(i)}`` and likewise for
    morphisms.  With ``obj_tags`` (``mor_tags``) each point is instead
    realized by ``{[church(i), e] | e in tags[x]}``, which gives groupoids
    whose object assemblies are not partitioned.  Structure realizers are
    lookup tables built lazily.  ``check=False`` skips the law check for
    tables that are groupoids by construction.
    """
    objects, morphisms = tuple(dict.fromkeys(objects)), tuple(dict.fromkeys(morphisms))
    dom = {m: dom[m] for m in morphisms}
    cod = {m: cod[m] for m in morphisms}
    if callable(comp):
        fn = comp
        comp = {(g, f): fn(g, f) for f in morphisms for g in morphisms if cod[f] == dom[g]}
    comp = dict(comp)
    ident = dict(ident) if ident is not None else _infer_identities(objects, morphisms, dom, cod, comp)
    inv = dict(inv) if inv is not None else _infer_inverses(morphisms, dom, cod, comp, ident)

    def indexed(points, tags):
        reals, dec = {}, I
        if tags is not None:
            dec = P0
            for i, x in enumerate(points):
                if not tags.get(x):
                    raise ValueError(f"tags for {x!r} must be nonempty")
                reals[x] = Fin([mk_pair(church(i), e) for e in tags[x]])
        else:
            for i, x in enumerate(points):
                reals[x] = Fin([church(i)])
        return Assembly(points, reals, {x: reals[x].elements[0] for x in points}), dec

    O, odec = indexed(objects, obj_tags)
    M, mdec = indexed(morphisms, mor_tags)
    midx = {m: i for i, m in enumerate(morphisms)}

    def build() -> StructureRealizers:
        ow, mw = O.witness, M.witness
        r_dom = table_map(mdec, [ow(dom[m]) for m in morphisms])
        r_cod = table_map(mdec, [ow(cod[m]) for m in morphisms])
        r_inv = table_map(mdec, [mw(inv[m]) for m in morphisms])
        r_id = table_map(odec, [mw(ident[x]) for x in objects])
        rows = []
        for f in morphisms:
            after = [g for g in morphisms if dom[g] == cod[f]]
            width = max((midx[g] for g in after), default=-1) + 1
            row = [I] * width
            for g in after:
                row[midx[g]] = mw(comp[(g, f)])
            rows.append(lookup_combinator(row))
        outer = lookup_combinator(rows)
        z = _v("z")
        r_comp = lam("z", App(App(outer, _decode(mdec, _p0(z))), _decode(mdec, _p1(z))))
        return StructureRealizers(r_dom, r_cod, r_id, r_comp, r_inv)

    return GroupoidAssembly(O, M, dom, cod, ident, comp, inv, build, odec, mdec, name=name, check=check)


def retabulate(G: GroupoidAssembly, name: str = "") -> GroupoidAssembly:
    """Church-indexed copy of ``G`` with the same carriers."""
    return tabulate(G.objects, G.morphisms, G.dom, G.cod, G.comp, G.ident, G.inv, name=name or G.name)


# ------------------------------------------------------- standard examples

def terminal_groupoid() -> GroupoidAssembly:
    return tabulate(["*"], ["id*"], {"id*": "*"}, {"id*": "*"}, {("id*", "id*"): "id*"}, name="1")


def discrete(objects: Iterable[Label], name: str = "") -> GroupoidAssembly:
    objects = tuple(objects)
    mors = [("id", x) for x in objects]
    return tabulate(objects, mors, {m: m[1] for m in mors}, {m: m[1] for m in mors},
                    {(m, m): m for m in mors}, {x: ("id", x) for x in objects}, {m: m for m in mors},
                    name=name)


def connected(objects: Sequence[Label], order: int = 1, name: str = "") -> GroupoidAssembly:
    """Connected groupoid on ``objects`` whose vertex groups are cyclic of
    the given order: morphisms ``(x, y, k)`` with ``k`` mod ``order``."""
    return groupoid_from_components([(objects, order)], name=name)


def groupoid_from_components(components: Sequence[tuple[Sequence[Label], int]], name: str = "",
                             obj_tags: Mapping | None = None) -> GroupoidAssembly:
    """Disjoint union of connected groupoids with cyclic vertex groups."""
    objects, mors, dom, cod, comp, ident, inv = [], [], {}, {}, {}, {}, {}
    for objs, n in components:
        if n < 1:
            raise ValueError("group order must be positive")
        objects.extend(objs)
        for x in objs:
            for y in objs:
                for k in range(n):
                    m = (x, y, k)
                    mors.append(m)
                    dom[m], cod[m] = x, y
                    inv[m] = (y, x, (-k) % n)
            ident[x] = (x, x, 0)
        for x in objs:
            for y in objs:
                for z in objs:
                    for a in range(n):
                        for b in range(n):
                            comp[((y, z, b), (x, y, a))] = (x, z, (a + b) % n)
    return tabulate(objects, mors, dom, cod, comp, ident, inv, obj_tags=obj_tags, name=name)


def codiscrete(objects: Sequence[Label], name: str = "") -> GroupoidAssembly:
    return connected(objects, 1, name=name)


def cyclic_group(n: int) -> GroupoidAssembly:
    """The group Z/n as a one-object groupoid; morphisms are ``0..n-1``."""
    els = list(range(n))
    return tabulate(["*"], els, {k: "*" for k in els}, {k: "*" for k in els},
                    {(b, a): (a + b) % n for a in els for b in els}, {"*": 0}, {k: (-k) % n for k in els},
                    name=f"Z/{n}")


def interval() -> GroupoidAssembly:
    """Two objects joined by one isomorphism ``line: 0 → 1``."""
    mors = ["id0", "id1", "line", "line_inv"]
    dom = {"id0": 0, "id1": 1, "line": 0, "line_inv": 1}
    cod = {"id0": 0, "id1": 1, "line": 1, "line_inv": 0}
    comp = {
        ("id0", "id0"): "id0", ("id1", "id1"): "id1",
        ("line", "id0"): "line", ("id1", "line"): "line",
        ("line_inv", "id1"): "line_inv", ("id0", "line_inv"): "line_inv",
        ("line_inv", "line"): "id0", ("line", "line_inv"): "id1",
    }
    return tabulate([0, 1], mors, dom, cod, comp, {0: "id0", 1: "id1"},
                    {"id0": "id0", "id1": "id1", "line": "line_inv", "line_inv": "line"}, name="I")


# ----------------------------------------------------------------- functors

class GFunctor:
    """A functor of groupoid assemblies.  Missing realizers are synthesized
    by lookup when the source is indexed."""

    def __init__(self, src: GroupoidAssembly, dst: GroupoidAssembly, ob: Mapping, mor: Mapping,
                 r_o: Term | None = None, r_m: Term | None = None, check: bool = True, name: str = "",
                 fuel: int | None = None) -> None:
        self.src, self.dst = src, dst
        self.fuel = fuel or max(src.fuel, dst.fuel)
        self.ob = {x: ob[x] for x in src.objects}
        self.mor = {m: mor[m] for m in src.morphisms}
        self._r_o, self._r_m = r_o, r_m
        self.name = name
        self.key = (tuple(self.ob[x] for x in src.objects), tuple(self.mor[m] for m in src.morphisms))
        if check:
            failures = functor_failures(self, first_only=True)
            if failures:
                raise FunctorError(failures[0])

    @property
    def r_o(self) -> Term | None:
        if self._r_o is None and self.src.obj_dec is not None:
            self._r_o = table_map(self.src.obj_dec, [self.dst.obj.witness(self.ob[x]) for x in self.src.objects])
        return self._r_o

    @property
    def r_m(self) -> Term | None:
        if self._r_m is None and self.src.mor_dec is not None:
            self._r_m = table_map(self.src.mor_dec,
                                  [self.dst.mor.witness(self.mor[m]) for m in self.src.morphisms])
        return self._r_m

    def __call__(self, x: Label) -> Label:
        return self.ob[x]

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, GFunctor) and self.src is other.src and self.dst is other.dst
                and self.key == other.key)

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        tag = self.name or "F"
        return f"GFunctor({tag}: {self.ob!r})"

    def compose(self, first: "GFunctor") -> "GFunctor":
        """``self ∘ first``."""
        if first.dst is not self.src:
            raise FunctorError("functors are not composable")
        r_o = r_m = None
        if first.r_o is not None and self.r_o is not None:
            r_o = lam("z", App(self.r_o, App(first.r_o, _v("z"))))
        if first.r_m is not None and self.r_m is not None:
            r_m = lam("z", App(self.r_m, App(first.r_m, _v("z"))))
        return GFunctor(first.src, self.dst, {x: self.ob[first.ob[x]] for x in first.src.objects},
                        {m: self.mor[first.mor[m]] for m in first.src.morphisms}, r_o, r_m, check=False,
                        fuel=self.fuel + first.fuel)

    def same_as(self, other: "GFunctor") -> bool:
        return self.ob == other.ob and self.mor == other.mor

    def check_realizers(self, fuel: int | None = None) -> Tri:
        if self.r_o is None or self.r_m is None:
            return unknown("functor carries no realizers")
        fuel = fuel or self.fuel
        a = check_morphism(AsmMorphism(self.src.obj, self.dst.obj, self.ob, self.r_o, validate=False), fuel)
        b = check_morphism(AsmMorphism(self.src.mor, self.dst.mor, self.mor, self.r_m, validate=False), fuel)
        return conj([a, b])


def functor_failures(F: GFunctor, first_only: bool = False) -> list[str]:
    X, Y = F.src, F.dst
    out: list[str] = []
    for x in X.objects:
        if F.ob[x] not in Y.obj:
            out.append(f"object {x!r} sent outside the target")
            if first_only:
                return out
    if out:
        return out
    for m in X.morphisms:
        fm = F.mor[m]
        if fm not in Y.mor:
            out.append(f"morphism {m!r} sent outside the target")
        elif Y.dom[fm] != F.ob[X.dom[m]] or Y.cod[fm] != F.ob[X.cod[m]]:
            out.append(f"F({m!r}) = {fm!r} has the wrong endpoints")
        if out and first_only:
            return out
    if out:
        return out
    for x in X.objects:
        if F.mor[X.ident[x]] != Y.ident[F.ob[x]]:
            out.append(f"F(id_{x!r}) is not an identity")
            if first_only:
                return out
    for f in X.morphisms:
        if F.mor[X.inv[f]] != Y.inv[F.mor[f]]:
            out.append(f"F({f!r}⁻¹) ≠ F({f!r})⁻¹")
            if first_only:
                return out
    if _preserves_composition(F):
        return out
    for f in X.morphisms:
        for g in X.out[X.cod[f]]:
            if F.mor[X.comp[(g, f)]] != Y.comp[(F.mor[g], F.mor[f])]:
                out.append(f"F({g!r}∘{f!r}) ≠ F({g!r})∘F({f!r})")
                if first_only:
                    return out
    return out


def _preserves_composition(F: GFunctor) -> bool:
    """Exact test in O(|morphisms| + Σ|vertex group|²), assuming endpoints
    are preserved.  Pick a base ``b`` and tree arrows ``t_x: b → x`` per
    component; ``F`` preserves composition iff it is a homomorphism on the
    vertex group at ``b`` and ``F(m) = F(t_y)·F(t_y⁻¹·m·t_x)·F(t_x)⁻¹`` for
    every ``m: x → y`` (the right side is a functor agreeing with ``F``)."""
    X, Y, Fm = F.src, F.dst, F.mor
    xc, yc = X.comp, Y.comp
    placed: set = set()
    for b in X.objects:
        if b in placed:
            continue
        tree = {b: X.ident[b]}
        todo = [b]
        while todo:
            x = todo.pop()
            for m in X.out[x]:
                y = X.cod[m]
                if y not in tree:
                    tree[y] = xc[(m, tree[x])]
                    todo.append(y)
        placed.update(tree)
        group = X.hom(b, b)
        for g in group:
            fg = Fm[g]
            for h in group:
                if Fm[xc[(h, g)]] != yc[(Fm[h], fg)]:
                    return False
        for x, tx in tree.items():
            back = Y.inv[Fm[tx]]
            for m in X.out[x]:
                ty = tree[X.cod[m]]
                core = xc[(X.inv[ty], xc[(m, tx)])]
                if Fm[m] != yc[(Fm[ty], yc[(Fm[core], back)])]:
                    return False
    return True


def identity_functor(G: GroupoidAssembly) -> GFunctor:
    return GFunctor(G, G, {x: x for x in G.objects}, {m: m for m in G.morphisms}, I, I, check=False)


def constant_functor(X: GroupoidAssembly, Y: GroupoidAssembly, y: Label) -> GFunctor:
    e = Y.ident[y]
    return GFunctor(X, Y, {x: y for x in X.objects}, {m: e for m in X.morphisms},
                    App(K, Y.obj.witness(y)), App(K, Y.mor.witness(e)), check=False)


def _assign(X: GroupoidAssembly, Y: GroupoidAssembly, ob: dict, mm: dict, m: Label, img: Label,
            allowed: Callable[[Label, Label], bool] | None = None) -> bool:
    """Extend a partial functor by ``m ↦ img`` and everything it forces."""
    stack = [(m, img)]
    while stack:
        m, img = stack.pop()
        if m in mm:
            if mm[m] != img:
                return False
            continue
        if allowed is not None and not allowed(m, img):
            return False
        for x, y in ((X.dom[m], Y.dom[img]), (X.cod[m], Y.cod[img])):
            if x in ob:
                if ob[x] != y:
                    return False
            else:
                ob[x] = y
                stack.append((X.ident[x], Y.ident[y]))
        mm[m] = img
        stack.append((X.inv[m], Y.inv[img]))
        for f in X.into[X.dom[m]]:
            if f in mm:
                stack.append((X.comp[(m, f)], Y.comp[(img, mm[f])]))
        for g in X.out[X.cod[m]]:
            if g in mm:
                stack.append((X.comp[(g, m)], Y.comp[(mm[g], img)]))
    return True


def iter_functor_maps(X: GroupoidAssembly, Y: GroupoidAssembly, ob: Mapping | None = None,
                      allowed: Callable[[Label, Label], bool] | None = None,
                      rng: random.Random | None = None) -> Iterator[tuple[dict, dict]]:
    """All functors ``X → Y`` as (object map, morphism map), by propagation
    search in a deterministic order.  ``ob`` optionally fixes object images;
    ``allowed(m, img)`` prunes morphism images (functors over a base); ``rng``
    shuffles the search order."""

    def order(xs):
        xs = list(xs)
        if rng is not None:
            rng.shuffle(xs)
        return xs

    start_ob: dict = {}
    start_mm: dict = {}
    if ob:
        for x, y in ob.items():
            if not _assign(X, Y, start_ob, start_mm, X.ident[x], Y.ident[y], allowed):
                return
    n = len(X.morphisms)

    def rec(ob: dict, mm: dict):
        if len(mm) == n and len(ob) == len(X.objects):
            yield dict(ob), dict(mm)
            return
        m = next((m for m in X.morphisms if m not in mm and X.dom[m] in ob), None)
        if m is None:
            x = next(x for x in X.objects if x not in ob)
            for y in order(Y.objects):
                ob2, mm2 = dict(ob), dict(mm)
                if _assign(X, Y, ob2, mm2, X.ident[x], Y.ident[y], allowed):
                    yield from rec(ob2, mm2)
            return
        src, tgt = ob[X.dom[m]], ob.get(X.cod[m])
        for img in order(Y.out[src]):
            if tgt is not None and Y.cod[img] != tgt:
                continue
            ob2, mm2 = dict(ob), dict(mm)
            if _assign(X, Y, ob2, mm2, m, img, allowed):
                yield from rec(ob2, mm2)

    yield from rec(start_ob, start_mm)


def functors(X: GroupoidAssembly, Y: GroupoidAssembly,
             allowed: Callable[[Label, Label], bool] | None = None) -> list[GFunctor]:
    return [GFunctor(X, Y, ob, mm, check=False) for ob, mm in iter_functor_maps(X, Y, allowed=allowed)]


def random_functor(X: GroupoidAssembly, Y: GroupoidAssembly, rng: random.Random,
                   allowed: Callable[[Label, Label], bool] | None = None) -> GFunctor | None:
    """Some functor ``X → Y`` found by randomized search, or ``None``."""
    found = next(iter_functor_maps(X, Y, allowed=allowed, rng=rng), None)
    return None if found is None else GFunctor(X, Y, *found, check=False)


# ------------------------------------------------------ natural isomorphisms

class NatIso:
    """A natural isomorphism ``F ⇒ G`` given by its components."""

    def __init__(self, F: GFunctor, G: GFunctor, component: Mapping, realizer: Term | None = None,
                 check: bool = True) -> None:
        if F.src is not G.src or F.dst is not G.dst:
            raise FunctorError("natural isomorphisms need parallel functors")
        self.F, self.G = F, G
        self.component = {x: component[x] for x in F.src.objects}
        self._realizer = realizer
        self.key = (F.key, G.key, tuple(self.component[x] for x in F.src.objects))
        if check:
            bad = natiso_failures(self, first_only=True)
            if bad:
                raise FunctorError(bad[0])

    @property
    def realizer(self) -> Term | None:
        X, Y = self.F.src, self.F.dst
        if self._realizer is None and X.obj_dec is not None:
            self._realizer = table_map(X.obj_dec, [Y.mor.witness(self.component[x]) for x in X.objects])
        return self._realizer

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NatIso) and self.key == other.key and self.F.src is other.F.src

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"NatIso({self.component!r})"

    def inverse(self) -> "NatIso":
        Y = self.F.dst
        return NatIso(self.G, self.F, {x: Y.inv[a] for x, a in self.component.items()}, check=False)

    def then(self, other: "NatIso") -> "NatIso":
        """Vertical composite ``other ∘ self``."""
        Y = self.F.dst
        return NatIso(self.F, other.G, {x: Y.comp[(other.component[x], self.component[x])]
                                         for x in self.component}, check=False)

    def check_realizer(self, fuel: int | None = None) -> Tri:
        if self.realizer is None:
            return unknown("natural isomorphism carries no realizer")
        X, Y = self.F.src, self.F.dst
        m = AsmMorphism(X.obj, Y.mor, self.component, self.realizer, validate=False)
        return check_morphism(m, fuel or max(X.fuel, Y.fuel))


def natiso_failures(a: NatIso, first_only: bool = False) -> list[str]:
    F, G = a.F, a.G
    X, Y = F.src, F.dst
    out = []
    for x in X.objects:
        c = a.component[x]
        if c not in Y.mor or Y.dom[c] != F.ob[x] or Y.cod[c] != G.ob[x]:
            out.append(f"component at {x!r} is not a morphism F({x!r}) → G({x!r})")
            if first_only:
                return out
    if out:
        return out
    for m in X.morphisms:
        x, y = X.dom[m], X.cod[m]
        if Y.comp[(G.mor[m], a.component[x])] != Y.comp[(a.component[y], F.mor[m])]:
            out.append(f"naturality square fails at {m!r}")
            if first_only:
                return out
    return out


def identity_natiso(F: GFunctor) -> NatIso:
    Y = F.dst
    return NatIso(F, F, {x: Y.ident[F.ob[x]] for x in F.src.objects}, check=False)


def _component_roots(X: GroupoidAssembly) -> list:
    seen, roots = set(), []
    for x in X.objects:
        if x in seen:
            continue
        roots.append(x)
        stack = [x]
        seen.add(x)
        while stack:
            u = stack.pop()
            for m in X.out[u]:
                v = X.cod[m]
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return roots


def _propagate_components(F: GFunctor, G: GFunctor, comps: dict, root: Label, a: Label) -> bool:
    X, Y = F.src, F.dst
    comps[root] = a
    stack = [root]
    while stack:
        x = stack.pop()
        ax = comps[x]
        for m in X.out[x]:
            y = X.cod[m]
            forced = Y.comp[(G.mor[m], Y.comp[(ax, Y.inv[F.mor[m]])])]
            if y in comps:
                if comps[y] != forced:
                    return False
            else:
                comps[y] = forced
                stack.append(y)
    return True


def iter_natisos(F: GFunctor, G: GFunctor) -> Iterator[NatIso]:
    """All natural isomorphisms ``F ⇒ G`` (one free choice per component)."""
    X, Y = F.src, F.dst
    roots = _component_roots(X)

    def rec(i: int, comps: dict):
        if i == len(roots):
            yield NatIso(F, G, comps, check=False)
            return
        r = roots[i]
        for a in Y.hom(F.ob[r], G.ob[r]):
            c2 = dict(comps)
            if _propagate_components(F, G, c2, r, a):
                yield from rec(i + 1, c2)

    yield from rec(0, {})


def homotopy(F: GFunctor, G: GFunctor) -> NatIso | None:
    """A natural isomorphism ``F ≅ G`` if one exists (the search is complete)."""
    return next(iter_natisos(F, G), None)


def ho_hom(X: GroupoidAssembly, Y: GroupoidAssembly) -> list[list[GFunctor]]:
    """Functors ``X → Y`` grouped into homotopy classes."""
    classes: list[list[GFunctor]] = []
    for F in functors(X, Y):
        for cls in classes:
            if homotopy(cls[0], F) is not None:
                cls.append(F)
                break
        else:
            classes.append([F])
    return classes


# ----------------------------------------------------------------- hom / exponential

def _domain(A: Assembly, x: Label) -> tuple[tuple[Term, ...], bool]:
    items = enumerate_set(A.real(x))
    if items is None:
        return (A.witness(x),), True
    return tuple(items), False


def functor_realizer_set(X: GroupoidAssembly, Y: GroupoidAssembly, F: GFunctor) -> RealizerSet:
    """``PairOf(Imp(object obligations), Imp(morphism obligations))``."""
    oc, mc, approx = [], [], False
    for x in X.objects:
        d, a = _domain(X.obj, x)
        approx |= a
        oc.append((d, Y.obj.real(F.ob[x])))
    for m in X.morphisms:
        d, a = _domain(X.mor, m)
        approx |= a
        mc.append((d, Y.mor.real(F.mor[m])))
    return PairOf(Imp(oc, approx), Imp(mc, approx))


def hom(X: GroupoidAssembly, Y: GroupoidAssembly, fs: Sequence[GFunctor] | None = None) -> Assembly:
    """The assembly of all functors ``X → Y`` with realizers ``[r_o, r_m]``."""
    fs = functors(X, Y) if fs is None else list(fs)
    for F in fs:
        if F.r_o is None or F.r_m is None:
            raise FunctorError("hom needs functors with realizers (indexed source)")
    fuel = max(X.fuel, Y.fuel)
    return Assembly(fs, lambda F: functor_realizer_set(X, Y, F), lambda F: mk_pair(F.r_o, F.r_m), fuel=fuel)


@dataclass
class Exponential:
    groupoid: GroupoidAssembly
    app: GFunctor
    base: GroupoidAssembly
    target: GroupoidAssembly
    domain: GProduct
    _index: dict = field(repr=False, default_factory=dict)

    def functor_point(self, ob: Mapping, mor: Mapping) -> GFunctor:
        A = self.base
        key = (tuple(ob[x] for x in A.objects), tuple(mor[m] for m in A.morphisms))
        return self._index[("o", key)]

    def natiso_point(self, F: GFunctor, G: GFunctor, comps: Mapping) -> NatIso:
        key = (F.key, G.key, tuple(comps[x] for x in self.base.objects))
        return self._index[("m", key)]

    def curry(self, h: GFunctor, left: GroupoidAssembly) -> GFunctor:
        """Transpose of ``h: X × A → B`` (``X = left``) to ``X → (A → B)``."""
        A, E = self.base, self.groupoid
        X = left
        ob, mm = {}, {}
        for x in X.objects:
            ob[x] = self.functor_point({a: h.ob[(x, a)] for a in A.objects},
                                       {m: h.mor[(X.ident[x], m)] for m in A.morphisms})
        for n in X.morphisms:
            ob_d, ob_c = ob[X.dom[n]], ob[X.cod[n]]
            mm[n] = self.natiso_point(ob_d, ob_c, {a: h.mor[(n, A.ident[a])] for a in A.objects})
        r_o = r_m = None
        if h.r_o is not None and h.r_m is not None:
            Xr, Ar = X.realizers, A.realizers
            x, a, m, n = _v("x"), _v("a"), _v("m"), _v("n")
            y_o = lam("x", _pair(lam("a", App(h.r_o, _pair(x, a))),
                                 lam("m", App(h.r_m, _pair(App(Xr.id, x), m)))))
            r_o = y_o
            r_m = lam("n", _pair(App(y_o, App(Xr.dom, n)),
                                 _pair(App(y_o, App(Xr.cod, n)),
                                       lam("a", App(h.r_m, _pair(n, App(Ar.id, a)))))))
        return GFunctor(X, E, ob, mm, r_o, r_m)


def exponential(A: GroupoidAssembly, B: GroupoidAssembly) -> Exponential:
    """The groupoid ``A → B`` of functors and natural isomorphisms.

    A functor is realized by ``[r_o, r_m]`` and a natural isomorphism
    ``(F, G, α)`` by ``[r_F, [r_G, r_α]]``."""
    fs = functors(A, B)
    H = hom(A, B, fs)
    isos: list[NatIso] = []
    for F in fs:
        for G in fs:
            isos.extend(iter_natisos(F, G))
    index: dict = {}
    for F in fs:
        index[("o", F.key)] = F
    for a in isos:
        index[("m", a.key)] = a

    def lookup(F, G, comps):
        return index[("m", (F.key, G.key, tuple(comps[x] for x in A.objects)))]

    dom = {a: a.F for a in isos}
    cod = {a: a.G for a in isos}
    ident = {F: lookup(F, F, {x: B.ident[F.ob[x]] for x in A.objects}) for F in fs}
    inv = {a: lookup(a.G, a.F, {x: B.inv[c] for x, c in a.component.items()}) for a in isos}
    by_dom: dict = {}
    for a in isos:
        by_dom.setdefault(a.F, []).append(a)
    comp = {}
    for a in isos:
        for b in by_dom.get(a.G, ()):
            comp[(b, a)] = lookup(a.F, b.G, {x: B.comp[(b.component[x], a.component[x])] for x in A.objects})

    def mor_real(a: NatIso) -> RealizerSet:
        cases, approx = [], False
        for x in A.objects:
            d, ap_ = _domain(A.obj, x)
            approx |= ap_
            cases.append((d, B.mor.real(a.component[x])))
        return PairOf(H.real(a.F), PairOf(H.real(a.G), Imp(cases, approx)))

    def mor_wit(a: NatIso) -> Term:
        if a.realizer is None:
            raise FunctorError("exponential needs an indexed base")
        return mk_pair(H.witness(a.F), mk_pair(H.witness(a.G), a.realizer))

    M = Assembly(isos, mor_real, mor_wit, fuel=max(A.fuel, B.fuel))

    def build() -> StructureRealizers:
        Br = B.realizers
        t, z, a = _v("t"), _v("z"), _v("a")
        r_dom = P0
        r_cod = lam("t", _p0(_p1(t)))
        r_id = lam("t", _pair(t, _pair(t, lam("a", App(Br.id, App(_p0(t), a))))))
        r_inv = lam("t", _pair(_p0(_p1(t)), _pair(_p0(t), lam("a", App(Br.inv, App(_p1(_p1(t)), a))))))
        first, second = _p0(z), _p1(z)
        r_comp = lam("z", _pair(_p0(first), _pair(
            _p0(_p1(second)),
            lam("a", App(Br.comp, _pair(App(_p1(_p1(first)), a), App(_p1(_p1(second)), a)))))))
        return StructureRealizers(r_dom, r_cod, r_id, r_comp, r_inv)

    E = GroupoidAssembly(H, M, dom, cod, ident, comp, inv, build, name=f"({A.name or 'A'}→{B.name or 'B'})")

    P = product(E, A)
    app_ob = {(F, x): F.ob[x] for F in fs for x in A.objects}
    app_mor = {}
    for al in isos:
        for m in A.morphisms:
            app_mor[(al, m)] = B.comp[(al.G.mor[m], al.component[A.dom[m]])]
    t = _v("t")
    Ar, Br = A.realizers, B.realizers
    app_o = lam("t", App(_p0(_p0(t)), _p1(t)))
    alpha = _p0(t)
    app_m = lam("t", App(Br.comp, _pair(App(_p1(_p1(alpha)), App(Ar.dom, _p1(t))),
                                         App(_p1(_p0(_p1(alpha))), _p1(t)))))
    app = GFunctor(P.groupoid, B, app_ob, app_mor, app_o, app_m, name="app")
    return Exponential(E, app, A, B, P, index)


# ---------------------------------------------------------------- (co)limits

@dataclass
class GProduct:
    groupoid: GroupoidAssembly
    pr0: GFunctor
    pr1: GFunctor
    left: GroupoidAssembly
    right: GroupoidAssembly

    def pairing(self, F: GFunctor, G: GFunctor) -> GFunctor:
        if F.src is not G.src:
            raise FunctorError("pairing needs a common source")
        r_o = r_m = None
        if None not in (F.r_o, G.r_o, F.r_m, G.r_m):
            z = _v("z")
            r_o = lam("z", _pair(App(F.r_o, z), App(G.r_o, z)))
            r_m = lam("z", _pair(App(F.r_m, z), App(G.r_m, z)))
        return GFunctor(F.src, self.groupoid, {x: (F.ob[x], G.ob[x]) for x in F.src.objects},
                        {m: (F.mor[m], G.mor[m]) for m in F.src.morphisms}, r_o, r_m)


def _pair_decoder(A: Assembly, B: Assembly, da: Term | None, db: Term | None) -> Term | None:
    if da is None or db is None:
        return None
    nb = len(B)
    rows = [lookup_combinator([church(i * nb + j) for j in range(nb)]) for i in range(len(A))]
    t = _v("t")
    return lam("t", App(App(lookup_combinator(rows), _decode(da, _p0(t))), _decode(db, _p1(t))))


def _lift2(fa: Term, fb: Term) -> Term:
    t = _v("t")
    return lam("t", _pair(App(fa, _p0(t)), App(fb, _p1(t))))


def product(A: GroupoidAssembly, B: GroupoidAssembly) -> GProduct:
    """Componentwise product; structure realizers act on pairs."""
    O = _asm.product(A.obj, B.obj).assembly
    M = _asm.product(A.mor, B.mor).assembly
    dom = {p: (A.dom[p[0]], B.dom[p[1]]) for p in M.carrier}
    cod = {p: (A.cod[p[0]], B.cod[p[1]]) for p in M.carrier}
    ident = {p: (A.ident[p[0]], B.ident[p[1]]) for p in O.carrier}
    inv = {p: (A.inv[p[0]], B.inv[p[1]]) for p in M.carrier}
    comp = {}
    for (fa, ga), ha in A.comp.items():
        for (fb, gb), hb in B.comp.items():
            comp[((fa, fb), (ga, gb))] = (ha, hb)

    def build() -> StructureRealizers:
        Ar, Br = A.realizers, B.realizers
        z = _v("z")
        first, second = _p0(z), _p1(z)
        r_comp = lam("z", _pair(App(Ar.comp, _pair(_p0(first), _p0(second))),
                                App(Br.comp, _pair(_p1(first), _p1(second)))))
        return StructureRealizers(_lift2(Ar.dom, Br.dom), _lift2(Ar.cod, Br.cod), _lift2(Ar.id, Br.id),
                                  r_comp, _lift2(Ar.inv, Br.inv))

    G = GroupoidAssembly(O, M, dom, cod, ident, comp, inv, build,
                         _pair_decoder(A.obj, B.obj, A.obj_dec, B.obj_dec),
                         _pair_decoder(A.mor, B.mor, A.mor_dec, B.mor_dec),
                         name=f"{A.name or 'A'}×{B.name or 'B'}", check=False)
    pr0 = GFunctor(G, A, {p: p[0] for p in O.carrier}, {p: p[0] for p in M.carrier}, P0, P0, check=False)
    pr1 = GFunctor(G, B, {p: p[1] for p in O.carrier}, {p: p[1] for p in M.carrier}, P1, P1, check=False)
    return GProduct(G, pr0, pr1, A, B)


def functor_product(F: GFunctor, G: GFunctor, P: GProduct | None = None,
                    Q: GProduct | None = None) -> GFunctor:
    """``F × G`` between the products of sources and of targets."""
    P = P or product(F.src, G.src)
    Q = Q or product(F.dst, G.dst)
    r_o = r_m = None
    if None not in (F.r_o, G.r_o, F.r_m, G.r_m):
        r_o, r_m = _lift2(F.r_o, G.r_o), _lift2(F.r_m, G.r_m)
    return GFunctor(P.groupoid, Q.groupoid, {p: (F.ob[p[0]], G.ob[p[1]]) for p in P.groupoid.objects},
                    {p: (F.mor[p[0]], G.mor[p[1]]) for p in P.groupoid.morphisms}, r_o, r_m)


@dataclass
class GCoproduct:
    groupoid: GroupoidAssembly
    inl: GFunctor
    inr: GFunctor


def _sum_decoder(A: Assembly, B: Assembly, da: Term | None, db: Term | None) -> Term | None:
    if da is None or db is None:
        return None
    shift = lookup_combinator([church(len(A) + j) for j in range(len(B))])
    t = _v("t")
    return lam("t", ap(_IFTHEN, _p0(t), _decode(da, _p1(t)), App(shift, _decode(db, _p1(t)))))


def _case(fa: Term, fb: Term, retag: bool = True) -> Term:
    t = _v("t")
    if retag:
        return lam("t", ap(_IFTHEN, _p0(t), _pair(K, App(fa, _p1(t))), _pair(KBAR, App(fb, _p1(t)))))
    return lam("t", ap(_IFTHEN, _p0(t), App(fa, _p1(t)), App(fb, _p1(t))))


def coproduct(A: GroupoidAssembly, B: GroupoidAssembly) -> GCoproduct:
    O = _asm.coproduct(A.obj, B.obj).assembly
    M = _asm.coproduct(A.mor, B.mor).assembly
    sides = (A, B)
    dom = {p: (p[0], sides[p[0]].dom[p[1]]) for p in M.carrier}
    cod = {p: (p[0], sides[p[0]].cod[p[1]]) for p in M.carrier}
    ident = {p: (p[0], sides[p[0]].ident[p[1]]) for p in O.carrier}
    inv = {p: (p[0], sides[p[0]].inv[p[1]]) for p in M.carrier}
    comp = {}
    for side, X in enumerate(sides):
        for (g, f), h in X.comp.items():
            comp[((side, g), (side, f))] = (side, h)

    def build() -> StructureRealizers:
        Ar, Br = A.realizers, B.realizers
        z = _v("z")
        first, second = _p0(z), _p1(z)
        r_comp = lam("z", ap(_IFTHEN, _p0(first),
                             _pair(K, App(Ar.comp, _pair(_p1(first), _p1(second)))),
                             _pair(KBAR, App(Br.comp, _pair(_p1(first), _p1(second))))))
        return StructureRealizers(_case(Ar.dom, Br.dom), _case(Ar.cod, Br.cod), _case(Ar.id, Br.id),
                                  r_comp, _case(Ar.inv, Br.inv))

    G = GroupoidAssembly(O, M, dom, cod, ident, comp, inv, build,
                         _sum_decoder(A.obj, B.obj, A.obj_dec, B.obj_dec),
                         _sum_decoder(A.mor, B.mor, A.mor_dec, B.mor_dec),
                         name=f"{A.name or 'A'}+{B.name or 'B'}")
    inl_r, inr_r = nf(CERT_INL), nf(CERT_INR)
    inl = GFunctor(A, G, {x: (0, x) for x in A.objects}, {m: (0, m) for m in A.morphisms}, inl_r, inl_r,
                   check=False)
    inr = GFunctor(B, G, {x: (1, x) for x in B.objects}, {m: (1, m) for m in B.morphisms}, inr_r, inr_r,
                   check=False)
    return GCoproduct(G, inl, inr)


@dataclass
class GEqualizer:
    groupoid: GroupoidAssembly
    incl: GFunctor


def equalizer(F: GFunctor, G: GFunctor) -> GEqualizer:
    """Sub-groupoid on which two parallel functors agree."""
    if F.src is not G.src or F.dst is not G.dst:
        raise FunctorError("equalizer needs a parallel pair")
    X = F.src
    objs = [x for x in X.objects if F.ob[x] == G.ob[x]]
    mors = [m for m in X.morphisms if F.mor[m] == G.mor[m]]
    O, M = X.obj.restrict(objs), X.mor.restrict(mors)
    keep = set(mors)
    comp = {k: v for k, v in X.comp.items() if k[0] in keep and k[1] in keep}

    def sub_dec(A: Assembly, sub: Assembly, dec):
        if dec is None:
            return None
        pos = {x: i for i, x in enumerate(sub.carrier)}
        L = lookup_combinator([church(pos[x]) if x in pos else I for x in A.carrier])
        return lam("t", App(L, _decode(dec, _v("t"))))

    E = GroupoidAssembly(O, M, X.dom, X.cod, {x: X.ident[x] for x in objs}, comp,
                         {m: X.inv[m] for m in mors}, lambda: X.realizers,
                         sub_dec(X.obj, O, X.obj_dec), sub_dec(X.mor, M, X.mor_dec), name="Eq")
    incl = GFunctor(E, X, {x: x for x in objs}, {m: m for m in mors}, I, I, check=False)
    return GEqualizer(E, incl)


# --------------------------------------------------------------- path object

@dataclass
class PathObject:
    groupoid: GroupoidAssembly
    d0: GFunctor
    d1: GFunctor
    sigma: GFunctor
    exponential: Exponential
    boundary: GFunctor
    square: GProduct


def path_object(X: GroupoidAssembly) -> PathObject:
    """``PX = (𝕀 → X)`` with endpoint projections and the constant-path map."""
    Iv = interval()
    ex = exponential(Iv, X)
    PX = ex.groupoid
    Xr = X.realizers
    t, z, r = _v("t"), _v("z"), _v("r")

    def endpoint(end: int) -> GFunctor:
        c = Iv.obj.witness(end)
        return GFunctor(PX, X, {F: F.ob[end] for F in PX.objects},
                        {a: a.component[end] for a in PX.morphisms},
                        lam("t", App(_p0(t), c)), lam("t", App(_p1(_p1(t)), c)), check=False)

    d0, d1 = endpoint(0), endpoint(1)
    s_ob, s_mor = {}, {}
    for x in X.objects:
        e = X.ident[x]
        s_ob[x] = ex.functor_point({0: x, 1: x}, {m: e for m in Iv.morphisms})
    for m in X.morphisms:
        s_mor[m] = ex.natiso_point(s_ob[X.dom[m]], s_ob[X.cod[m]], {0: m, 1: m})
    sig_o = lam("z", _pair(App(K, z), App(K, App(Xr.id, z))))
    sig_m = lam("r", _pair(App(sig_o, App(Xr.dom, r)), _pair(App(sig_o, App(Xr.cod, r)), App(K, r))))
    sigma = GFunctor(X, PX, s_ob, s_mor, sig_o, sig_m)
    sq = product(X, X)
    boundary = sq.pairing(d0, d1)
    return PathObject(PX, d0, d1, sigma, ex, boundary, sq)


# ------------------------------------------------------------- presentations

@dataclass(frozen=True)
class Relation:
    clause: str
    lhs: tuple
    rhs: tuple


class RelationViolation(ValueError):
    def __init__(self, clause: str, relation: Relation | None, message: str) -> None:
        super().__init__(f"{clause}: {message}")
        self.clause = clause
        self.relation = relation


@dataclass
class PresentedGroupoid:
    """Objects, generating arrows and relations between chains of
    generators (chains listed first-to-last)."""

    objects: tuple
    generators: tuple
    gen_dom: dict
    gen_cod: dict
    identity: dict
    inverse: dict
    relations: tuple

    def __post_init__(self) -> None:
        for rel in self.relations:
            for w in (rel.lhs, rel.rhs):
                if not w:
                    raise ValueError("relation words must be nonempty")
                for a, b in zip(w, w[1:]):
                    if self.gen_cod[a] != self.gen_dom[b]:
                        raise ValueError(f"relation word {w!r} is not a composable chain")
            if (self.gen_dom[rel.lhs[0]], self.gen_cod[rel.lhs[-1]]) != \
                    (self.gen_dom[rel.rhs[0]], self.gen_cod[rel.rhs[-1]]):
                raise ValueError(f"relation {rel!r} relates chains with different endpoints")

    def word_dom(self, w: Sequence) -> Label:
        return self.gen_dom[w[0]]

    def word_cod(self, w: Sequence) -> Label:
        return self.gen_cod[w[-1]]

    def inverse_word(self, w: Sequence) -> tuple:
        return tuple(self.inverse[g] for g in reversed(w))

    def violations(self, G: GroupoidAssembly, assignment: Mapping) -> list[RelationViolation]:
        out: list[RelationViolation] = []
        for gname in self.generators:
            if gname not in assignment or assignment[gname] not in G.mor:
                out.append(RelationViolation("typing", None, f"generator {gname!r} is not assigned"))
        if out:
            return out
        ob = {x: G.dom[assignment[self.identity[x]]] for x in self.objects}
        for gname in self.generators:
            m = assignment[gname]
            if G.dom[m] != ob[self.gen_dom[gname]] or G.cod[m] != ob[self.gen_cod[gname]]:
                out.append(RelationViolation("typing", None, f"generator {gname!r} lands on the wrong objects"))
        if out:
            return out
        for rel in self.relations:
            if G.chain([assignment[g] for g in rel.lhs]) != G.chain([assignment[g] for g in rel.rhs]):
                out.append(RelationViolation(rel.clause, rel, f"{rel.lhs!r} ~ {rel.rhs!r} fails"))
        return out

    def induce(self, G: GroupoidAssembly, assignment: Mapping) -> "InducedFunctor":
        bad = self.violations(G, assignment)
        if bad:
            raise bad[0]
        ob = {x: G.dom[assignment[self.identity[x]]] for x in self.objects}
        return InducedFunctor(self, G, ob, {g: assignment[g] for g in self.generators})

    def assignments(self, G: GroupoidAssembly) -> Iterator[dict]:
        """Every relation-respecting generator assignment into ``G``."""
        gens = list(self.generators)
        pos = {g: i for i, g in enumerate(gens)}
        by_last: dict[int, list[Relation]] = {}
        for rel in self.relations:
            last = max(pos[g] for g in rel.lhs + rel.rhs)
            by_last.setdefault(last, []).append(rel)

        def rec(i: int, asg: dict, ob: dict):
            if i == len(gens):
                yield dict(asg)
                return
            g = gens[i]
            d, c = self.gen_dom[g], self.gen_cod[g]
            for m in G.morphisms:
                if (d in ob and G.dom[m] != ob[d]) or (c in ob and G.cod[m] != ob[c]):
                    continue
                if d == c and G.dom[m] != G.cod[m]:
                    continue
                ob2 = dict(ob)
                ob2.setdefault(d, G.dom[m])
                ob2.setdefault(c, G.cod[m])
                asg[g] = m
                if all(G.chain([asg[x] for x in r.lhs]) == G.chain([asg[x] for x in r.rhs])
                       for r in by_last.get(i, ())):
                    yield from rec(i + 1, asg, ob2)
                del asg[g]

        yield from rec(0, {}, {})


@dataclass
class InducedFunctor:
    presentation: PresentedGroupoid
    target: GroupoidAssembly
    ob: dict
    gen: dict

    def apply(self, word: Sequence) -> Label:
        P = self.presentation
        for a, b in zip(word, word[1:]):
            if P.gen_cod[a] != P.gen_dom[b]:
                raise ValueError("word is not a composable chain")
        return self.target.chain([self.gen[g] for g in word])


@dataclass
class CoequalizerPresentation:
    presentation: PresentedGroupoid
    obj_class: dict
    mor_class: dict
    source: GroupoidAssembly

    def __iter__(self):
        yield self.presentation
        yield self.induce

    def induce(self, G: GroupoidAssembly, assignment: Mapping) -> InducedFunctor:
        return self.presentation.induce(G, assignment)

    def quotient_word(self, m: Label) -> tuple:
        return (self.mor_class[m],)

    def compose_quotient(self, h: InducedFunctor) -> GFunctor:
        """``h ∘ [-]``: the functor out of the codomain of the pair."""
        B = self.source
        return GFunctor(B, h.target, {b: h.ob[self.obj_class[b]] for b in B.objects},
                        {m: h.gen[self.mor_class[m]] for m in B.morphisms})


def _union_find(points: Sequence, pairs: Iterable[tuple]) -> dict:
    parent = {p: p for p in points}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    order = {p: i for i, p in enumerate(points)}
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            if order[ra] < order[rb]:
                parent[rb] = ra
            else:
                parent[ra] = rb
    groups: dict = {}
    for p in points:
        groups.setdefault(find(p), []).append(p)
    return {p: tuple(groups[find(p)]) for p in points}


def coequalizer_presented(f: GFunctor, g: GFunctor) -> CoequalizerPresentation:
    """Presentation of the coequalizer of a parallel pair by generators
    (classes of morphisms) and the unit, inverse and composition relations."""
    if f.src is not g.src or f.dst is not g.dst:
        raise FunctorError("coequalizer needs a parallel pair")
    A, B = f.src, f.dst
    ocls = _union_find(B.objects, ((f.ob[a], g.ob[a]) for a in A.objects))
    mcls = _union_find(B.morphisms, ((f.mor[m], g.mor[m]) for m in A.morphisms))
    objects = tuple(dict.fromkeys(ocls[b] for b in B.objects))
    gens = tuple(dict.fromkeys(mcls[m] for m in B.morphisms))
    gdom = {c: ocls[B.dom[c[0]]] for c in gens}
    gcod = {c: ocls[B.cod[c[0]]] for c in gens}
    ident = {ocls[b]: mcls[B.ident[b]] for b in B.objects}
    inverse = {mcls[m]: mcls[B.inv[m]] for m in B.morphisms}
    rels: dict[tuple, Relation] = {}

    def add(clause: str, lhs: tuple, rhs: tuple) -> None:
        if lhs != rhs and (lhs, rhs) not in rels:
            rels[(lhs, rhs)] = Relation(clause, lhs, rhs)

    for c in gens:
        add("right-unit", (c,), (c, ident[gcod[c]]))
        add("left-unit", (c,), (ident[gdom[c]], c))
    comp_rels = []
    for t0 in B.morphisms:
        for t1 in B.out[B.cod[t0]]:
            lhs, rhs = (mcls[B.comp[(t1, t0)]],), (mcls[t0], mcls[t1])
            comp_rels.append((lhs, rhs))
            add("composition", lhs, rhs)
    for lhs, rhs in comp_rels:
        add("inverse", tuple(inverse[x] for x in reversed(lhs)), tuple(inverse[x] for x in reversed(rhs)))
    P = PresentedGroupoid(objects, gens, gdom, gcod, ident, inverse, tuple(rels.values()))
    return CoequalizerPresentation(P, ocls, mcls, B)


# ------------------------------------------------------------ finite categories

class FinCat:
    """A finite category (no inverses required)."""

    def __init__(self, objects: Iterable[Label], morphisms: Iterable[Label], dom: Mapping, cod: Mapping,
                 ident: Mapping, comp: Mapping | Callable) -> None:
        self.objects = tuple(dict.fromkeys(objects))
        self.morphisms = tuple(dict.fromkeys(morphisms))
        self.dom = {m: dom[m] for m in self.morphisms}
        self.cod = {m: cod[m] for m in self.morphisms}
        self.ident = {x: ident[x] for x in self.objects}
        if callable(comp):
            fn = comp
            comp = {(h, f): fn(h, f) for f in self.morphisms for h in self.morphisms
                    if self.cod[f] == self.dom[h]}
        self.comp = dict(comp)
        self.out = {x: [m for m in self.morphisms if self.dom[m] == x] for x in self.objects}
        for x in self.objects:
            e = self.ident[x]
            if self.dom.get(e) != x or self.cod.get(e) != x:
                raise GroupoidLawError(f"identity of {x!r} is not an endomorphism of it", (x,))
        for f in self.morphisms:
            for h in self.out[self.cod[f]]:
                c = self.comp.get((h, f))
                if c is None or self.dom[c] != self.dom[f] or self.cod[c] != self.cod[h]:
                    raise GroupoidLawError(f"composite {h!r}∘{f!r} missing or mistyped", (h, f))
            if self.comp[(self.ident[self.cod[f]], f)] != f or self.comp[(f, self.ident[self.dom[f]])] != f:
                raise GroupoidLawError(f"unit law fails at {f!r}", (f,))
        for f in self.morphisms:
            for h in self.out[self.cod[f]]:
                for k in self.out[self.cod[h]]:
                    if self.comp[(k, self.comp[(h, f)])] != self.comp[(self.comp[(k, h)], f)]:
                        raise GroupoidLawError(f"associativity fails at ({k!r}, {h!r}, {f!r})", (k, h, f))

    def hom(self, x: Label, y: Label) -> list:
        """``C(x, y)`` with the identity first when ``x = y``."""
        ms = [m for m in self.morphisms if self.dom[m] == x and self.cod[m] == y]
        if x == y:
            ms.remove(self.ident[x])
            ms.insert(0, self.ident[x])
        return ms

    @classmethod
    def from_groupoid(cls, G: GroupoidAssembly) -> "FinCat":
        return cls(G.objects, G.morphisms, G.dom, G.cod, G.ident, G.comp)


class FreeGroupoidTooLarge(ValueError):
    pass


def _coset_table(ngens: int, relators: Sequence[Sequence[int]], limit: int) -> list[list[int]]:
    """Coset enumeration over the trivial subgroup (HLT strategy with
    coincidence processing).  Columns ``2j``/``2j+1`` are generator ``j`` and
    its inverse.  Raises :class:`FreeGroupoidTooLarge` past ``limit`` cosets."""
    ncols = 2 * ngens
    table: list[list[int]] = [[-1] * ncols]
    parent = [0]

    def find(c: int) -> int:
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def define(c: int, x: int) -> None:
        if len(table) >= limit:
            raise FreeGroupoidTooLarge(f"free groupoid infinite within bound ({limit} cosets)")
        d = len(table)
        table.append([-1] * ncols)
        parent.append(d)
        table[c][x] = d
        table[d][x ^ 1] = c

    def coincidence(a: int, b: int) -> None:
        queue: list[int] = []

        def merge(u: int, v: int) -> None:
            u, v = find(u), find(v)
            if u == v:
                return
            if u > v:
                u, v = v, u
            parent[v] = u
            queue.append(v)

        merge(a, b)
        i = 0
        while i < len(queue):
            e = queue[i]
            i += 1
            for x in range(ncols):
                f = table[e][x]
                if f < 0:
                    continue
                table[f][x ^ 1] = -1
                e1, f1 = find(e), find(f)
                if table[e1][x] >= 0:
                    merge(f1, table[e1][x])
                elif table[f1][x ^ 1] >= 0:
                    merge(e1, table[f1][x ^ 1])
                else:
                    table[e1][x] = f1
                    table[f1][x ^ 1] = e1

    def scan_and_fill(c: int, w: Sequence[int]) -> None:
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] >= 0:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][w[j] ^ 1] >= 0:
                b = table[b][w[j] ^ 1]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][w[i] ^ 1] = f
                return
            define(f, w[i])

    c = 0
    while c < len(table):
        if find(c) == c:
            for w in relators:
                scan_and_fill(c, w)
                if find(c) != c:
                    break
            if find(c) == c:
                for x in range(ncols):
                    if table[c][x] < 0:
                        define(c, x)
        c += 1
    live = [c for c in range(len(table)) if find(c) == c]
    pos = {c: i for i, c in enumerate(live)}
    return [[pos[find(table[c][x])] for x in range(ncols)] for c in live]


@dataclass
class _Group:
    table: list[list[int]]
    words: list[list[int]]
    _mult: dict = field(default_factory=dict)

    def mult(self, a: int, b: int) -> int:
        key = (a, b)
        if key not in self._mult:
            c = a
            for x in self.words[b]:
                c = self.table[c][x]
            self._mult[key] = c
        return self._mult[key]

    def inverse(self, a: int) -> int:
        c = 0
        for x in reversed(self.words[a]):
            c = self.table[c][x ^ 1]
        return c

    def __len__(self) -> int:
        return len(self.table)


def _group_from_table(table: list[list[int]]) -> _Group:
    words: list[list[int] | None] = [None] * len(table)
    words[0] = []
    queue = [0]
    for c in queue:
        for x, d in enumerate(table[c]):
            if words[d] is None:
                words[d] = words[c] + [x]
                queue.append(d)
    return _Group(table, words)  # type: ignore[arg-type]


@dataclass
class Groupoidification:
    groupoid: GroupoidAssembly
    category: FinCat
    inclusion: dict
    derivation: dict = field(repr=False)

    def generator_realizer(self, f: Label) -> Term:
        """``[k, [[φ(c), φ(c')], [k, ψ(f)]]]`` for a morphism of the category."""
        C = self.category
        c, c2 = C.dom[f], C.cod[f]
        n = C.hom(c, c2).index(f)
        G = self.groupoid
        return mk_pair(K, mk_pair(mk_pair(G.obj.witness(c), G.obj.witness(c2)), mk_pair(K, church(n))))

    def extend(self, target: GroupoidAssembly, ob: Mapping, mor: Mapping) -> GFunctor:
        """The unique functor out of the free groupoid extending ``(ob, mor)``."""
        C, G = self.category, self.groupoid
        for f in C.morphisms:
            h = mor[f]
            if target.dom[h] != ob[C.dom[f]] or target.cod[h] != ob[C.cod[f]]:
                raise FunctorError(f"{f!r} is sent to a morphism with the wrong endpoints")
        images: dict = {}

        def value(m):
            if m in images:
                return images[m]
            kind, data = self.derivation[m]
            if kind == "id":
                v = target.ident[ob[data]]
            elif kind == "gen":
                v = mor[data]
            elif kind == "inv":
                v = target.inv[mor[data]]
            else:
                v = target.comp[(value(data[1]), value(data[0]))]
            images[m] = v
            return v

        for m in G.morphisms:
            value(m)
        return GFunctor(G, target, {x: ob[x] for x in G.objects}, images,
                        None, _word_functor_realizer(self, target, ob, mor))


def _word_functor_realizer(cg: Groupoidification, target: GroupoidAssembly, ob: Mapping,
                           mor: Mapping) -> Term:
    """Realizer of the morphism part of an extension: recursion over the
    tagged word structure by self-application."""
    C = cg.category
    Tr = target.realizers
    objs = cg.groupoid.objects
    rows = []
    for c in objs:
        row = []
        for c2 in objs:
            row.append(lookup_combinator([target.mor.witness(mor[f]) for f in C.hom(c, c2)] or [I]))
        rows.append(lookup_combinator(row))
    gens = lookup_combinator(rows)
    w, me = _v("w"), _v("u")

    def call(arg: Term) -> Term:
        return App(App(me, arg), me)

    def body_of(x: Term) -> Term:
        hdr, rest = _p0(x), _p1(x)
        gen_case = ap(gens, _p0(hdr), _p1(hdr), _p1(rest))
        pair = _p1(rest)
        comp_case = App(Tr.comp, _pair(call(_p1(pair)), call(_p0(pair))))
        return ap(_IFTHEN, _p0(rest), gen_case, comp_case)

    flipped = _pair(_pair(_p1(_p0(_p1(w))), _p0(_p0(_p1(w)))), _p1(_p1(w)))
    worker = lam("w u", ap(_IFTHEN, _p0(w), body_of(_p1(w)), App(Tr.inv, body_of(flipped))))
    return lam("w", App(App(worker, w), worker))


_NOT = lam("x", ap(_v("x"), KBAR, K))


def groupoidify(C: FinCat, limit: int = 2_000) -> Groupoidification:
    """The free groupoid on a finite category with tagged word realizers.

    Each connected component's vertex group is computed by coset
    enumeration; a component whose enumeration exceeds ``limit`` cosets is
    rejected with :class:`FreeGroupoidTooLarge`."""
    # connected components and spanning trees
    adj: dict = {x: [] for x in C.objects}
    for m in C.morphisms:
        if m != C.ident[C.dom[m]]:
            adj[C.dom[m]].append((m, C.cod[m]))
            adj[C.cod[m]].append((m, C.dom[m]))
    comp_of: dict = {}
    components: list[list] = []
    tree_edges: set = set()
    for x in C.objects:
        if x in comp_of:
            continue
        members = [x]
        comp_of[x] = len(components)
        for u in members:
            for m, v in adj[u]:
                if v not in comp_of:
                    comp_of[v] = len(components)
                    tree_edges.add(m)
                    members.append(v)
        components.append(members)

    nonid = [m for m in C.morphisms if m != C.ident[C.dom[m]]]
    groups: list[_Group] = []
    gen_index: dict = {}
    for ci, members in enumerate(components):
        gens = [m for m in nonid if comp_of[C.dom[m]] == ci]
        idx = {m: j for j, m in enumerate(gens)}
        rels: list[list[int]] = [[2 * idx[m]] for m in gens if m in tree_edges]
        for f in gens:
            for h in C.out[C.cod[f]]:
                if h not in idx:
                    continue
                hf = C.comp[(h, f)]
                word = [2 * idx[h], 2 * idx[f]]
                if hf in idx:
                    word.append(2 * idx[hf] + 1)
                rels.append(word)
        table = _coset_table(len(gens), rels, limit)
        groups.append(_group_from_table(table))
        for m, j in idx.items():
            gen_index[m] = (ci, j)

    def elt(m: Label) -> int:
        if m not in gen_index:
            return 0
        ci, j = gen_index[m]
        return groups[ci].table[0][2 * j]

    mors: list = []
    total = sum(len(ms) ** 2 * len(groups[ci]) for ci, ms in enumerate(components))
    if total > limit:
        raise FreeGroupoidTooLarge(f"free groupoid infinite within bound ({total} morphisms)")
    label: dict = {}
    for ci, members in enumerate(components):
        for x in members:
            label[(x, x, 0)] = C.ident[x]
    for f in C.morphisms:
        label.setdefault((C.dom[f], C.cod[f], elt(f)), f)
    for f in C.morphisms:
        ci = comp_of[C.dom[f]]
        label.setdefault((C.cod[f], C.dom[f], groups[ci].inverse(elt(f))), ("inv", f))
    for ci, members in enumerate(components):
        for x in members:
            for y in members:
                for a in range(len(groups[ci])):
                    label.setdefault((x, y, a), ("cg", x, y, a))
                    mors.append((x, y, a))
    names = [label[t] for t in mors]
    dom = {label[t]: t[0] for t in mors}
    cod = {label[t]: t[1] for t in mors}
    ident = {x: C.ident[x] for x in C.objects}
    inv, comp = {}, {}
    for t in mors:
        ci = comp_of[t[0]]
        inv[label[t]] = label[(t[1], t[0], groups[ci].inverse(t[2]))]
    for t in mors:
        ci = comp_of[t[0]]
        grp = groups[ci]
        for z in components[ci]:
            for b in range(len(grp)):
                s = (t[1], z, b)
                comp[(label[s], label[t])] = label[(t[0], z, grp.mult(b, t[2]))]
    inclusion = {f: label[(C.dom[f], C.cod[f], elt(f))] for f in C.morphisms}

    obj_asm = Assembly(C.objects, {x: Fin([church(i)]) for i, x in enumerate(C.objects)})
    phi = {x: church(i) for i, x in enumerate(C.objects)}
    phi_inv = {i: x for i, x in enumerate(C.objects)}

    # derivations: how each morphism is reached from generators
    derivation: dict = {}
    witness: dict = {}
    for x in C.objects:
        derivation[C.ident[x]] = ("id", x)
        witness[C.ident[x]] = mk_pair(K, mk_pair(mk_pair(phi[x], phi[x]), mk_pair(K, church(0))))
    steps: list = []
    for f in nonid:
        c, c2 = C.dom[f], C.cod[f]
        g = inclusion[f]
        w = mk_pair(K, mk_pair(mk_pair(phi[c], phi[c2]), mk_pair(K, church(C.hom(c, c2).index(f)))))
        if g not in derivation:
            derivation[g] = ("gen", f)
            witness[g] = w
        vi = inv[g]
        wi = mk_pair(KBAR, mk_pair(mk_pair(phi[c2], phi[c]), unpair(unpair(w)[1])[1]))
        if vi not in derivation:
            derivation[vi] = ("inv", f)
            witness[vi] = wi
        steps.append((g, w))
        steps.append((vi, wi))
    frontier = list(derivation)
    while frontier:
        new = []
        for m in frontier:
            for g, wg in steps:
                if cod[m] != dom[g]:
                    continue
                h = comp[(g, m)]
                if h in derivation:
                    continue
                derivation[h] = ("comp", (m, g))
                hdr = mk_pair(phi[dom[m]], phi[cod[g]])
                witness[h] = mk_pair(K, mk_pair(hdr, mk_pair(KBAR, mk_pair(wg, witness[m]))))
                new.append(h)
        frontier = new
    missing = [m for m in names if m not in derivation]
    if missing:
        raise GroupoidLawError(f"morphism {missing[0]!r} not reachable from generators", (missing[0],))

    cache: dict = {}

    def value(t: Term):
        if t in cache:
            return cache[t]
        cache[t] = None
        out = _word_value(t)
        cache[t] = out
        return out

    def _word_value(t: Term):
        p = unpair(t)
        if p is None:
            return None
        tag, rest = p
        q = unpair(rest)
        if q is None:
            return None
        hdr, body = q
        h = unpair(hdr)
        if h is None:
            return None
        i0, i1 = church_value(h[0]), church_value(h[1])
        if i0 not in phi_inv or i1 not in phi_inv:
            return None
        c, c2 = phi_inv[i0], phi_inv[i1]
        if tag is KBAR:
            base = value(mk_pair(K, mk_pair(mk_pair(h[1], h[0]), body)))
            return None if base is None else inv[base]
        if tag is not K:
            return None
        b = unpair(body)
        if b is None:
            return None
        kind, data = b
        if kind is K:
            n = church_value(data)
            hs = C.hom(c, c2)
            if n is None or n >= len(hs):
                return None
            return inclusion[hs[n]]
        if kind is not KBAR:
            return None
        pr = unpair(data)
        if pr is None:
            return None
        second, first = value(pr[0]), value(pr[1])
        if first is None or second is None or cod[first] != dom[second]:
            return None
        res = comp[(second, first)]
        if dom[res] != c or cod[res] != c2:
            return None
        return res

    def real(m: Label) -> RealizerSet:
        return Decided(f"word[{m!r}]", lambda t, fuel, m=m: YES if value(t) == m else NO)

    mor_asm = Assembly(names, real, witness)

    def build() -> StructureRealizers:
        w, z = _v("w"), _v("z")
        hdr = lambda u: _p0(_p1(u))  # noqa: E731
        r_dom = lam("w", _p0(hdr(w)))
        r_cod = lam("w", _p1(hdr(w)))
        r_id = lam("z", _pair(K, _pair(_pair(z, z), _pair(K, church(0)))))
        first, second = _p0(z), _p1(z)
        r_comp = lam("z", _pair(K, _pair(_pair(_p0(hdr(first)), _p1(hdr(second))),
                                          _pair(KBAR, _pair(second, first)))))
        r_inv = lam("w", _pair(App(_NOT, _p0(w)), _pair(_pair(_p1(hdr(w)), _p0(hdr(w))), _p1(_p1(w)))))
        return StructureRealizers(r_dom, r_cod, r_id, r_comp, r_inv)

    G = GroupoidAssembly(obj_asm, mor_asm, dom, cod, ident, comp, inv, build, obj_dec=I, name="Cg")
    return Groupoidification(G, C, inclusion, derivation)


__all__ = [
    "GroupoidAssembly", "StructureRealizers", "GroupoidLawError", "FunctorError", "law_failures",
    "tabulate", "retabulate", "table_map", "terminal_groupoid", "discrete", "connected", "codiscrete",
    "groupoid_from_components", "cyclic_group", "interval",
    "GFunctor", "functor_failures", "identity_functor", "constant_functor", "iter_functor_maps", "functors",
    "NatIso", "natiso_failures", "identity_natiso", "iter_natisos", "homotopy", "ho_hom",
    "functor_realizer_set", "hom", "Exponential", "exponential",
    "GProduct", "product", "functor_product", "GCoproduct", "coproduct", "GEqualizer", "equalizer",
    "PathObject", "path_object",
    "Relation", "RelationViolation", "PresentedGroupoid", "InducedFunctor", "CoequalizerPresentation",
    "coequalizer_presented", "FinCat", "FreeGroupoidTooLarge", "Groupoidification", "groupoidify",
]
