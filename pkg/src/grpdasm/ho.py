"""Homotopy-level tools: equivalence search, regular equivalences, the
partition coreflection ``Part`` with ``atom``, a finite ``Clus`` with the
transposition, type predicates and direct truncations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from .asm import Assembly, AsmMorphism, check_morphism, is_modest
from .grpd import (
    FunctorError, GFunctor, GroupoidAssembly, Key, NatIso, StructureRealizers, _p0, _p1, _pair, _v,
    functor_realizer_set, functors, identity_functor, infer_decoder, table_map,
)
from .pca import DEFAULT_FUEL, App, I, K, S, OutOfFuel, P0, P1, Term, church, enumerate_terms, evaluate, lam, mk_pair, unpair
from .rset import (
    Compl, Fin, Imp, Inter, PairOf, StructuralError, Tri, enumerate_set, member, no, union_all, unknown, yes,
)

Label = Hashable
DEFAULT_BUDGET = 5


@dataclass(frozen=True)
class NotFoundWithinBudget:
    """Search exhaustion.  Says nothing about existence of a realized
    equivalence, except when ``carrier_level`` is set: then the underlying
    functor of sets already fails to be an equivalence."""
    reason: str
    tried: int = 0
    carrier_level: bool = False

    def __bool__(self) -> bool:
        return False


@dataclass
class EquivData:
    """``F`` with ``Fi``, ``alpha: Fi∘F ≅ id`` and ``beta: F∘Fi ≅ id``."""
    F: GFunctor
    Fi: GFunctor
    alpha: NatIso
    beta: NatIso


@dataclass(frozen=True)
class RegEqWitness:
    ess: Term
    ful: Term
    fai: Term


# ---------------------------------------------------------------- search

def find_tracker(src: Assembly, dst: Assembly, mapping: Mapping, budget: int = DEFAULT_BUDGET,
                 dec: Term | None = None, fuel: int = DEFAULT_FUEL, hints: Sequence[Term] = ()) -> Term | None:
    """A realizer of ``mapping`` as an assembly map: a lookup table when the
    source decodes, a constant when the map is constant, then the ``hints``,
    otherwise the first tracking term among all terms of size ``≤ budget``."""
    dec = dec if dec is not None else infer_decoder(src)
    cands: list[Term] = list(hints)
    if dec is not None:
        cands.append(table_map(dec, [dst.witness(mapping[x]) for x in src.carrier]))
    targets = {mapping[x] for x in src.carrier}
    if len(targets) == 1:
        cands.append(App(K, dst.witness(targets.pop())))
    for r in cands:
        if check_morphism(AsmMorphism(src, dst, mapping, r, validate=False), fuel).is_yes:
            return r
    for r in enumerate_terms(budget):
        if check_morphism(AsmMorphism(src, dst, mapping, r, validate=False), fuel).is_yes:
            return r
    return None


def _realized(F: GFunctor, budget: int, hints: Sequence[Term] = ()) -> GFunctor | None:
    if F.r_o is not None and F.r_m is not None:
        return F
    X, Y = F.src, F.dst
    r_o = F.r_o or find_tracker(X.obj, Y.obj, F.ob, budget, fuel=max(X.fuel, Y.fuel), hints=hints)
    if r_o is None:
        return None
    r_m = F.r_m or find_tracker(X.mor, Y.mor, F.mor, budget, fuel=max(X.fuel, Y.fuel), hints=hints)
    if r_m is None:
        return None
    return GFunctor(X, Y, F.ob, F.mor, r_o, r_m, check=False, name=F.name)


def _realized_iso(F: GFunctor, G: GFunctor, comps: Mapping, budget: int,
                  hints: Sequence[Term] = ()) -> NatIso | None:
    a = NatIso(F, G, comps)
    if a.realizer is not None:
        return a
    X, Y = F.src, F.dst
    hints = list(hints)
    if all(Y.is_identity(c) for c in a.component.values()):
        # the identity realizer of Y may take the object realizer of x to the component id_x
        hints.insert(0, Y.realizers.id)
    r = find_tracker(X.obj, Y.mor, a.component, budget, fuel=max(X.fuel, Y.fuel), hints=hints)
    return None if r is None else NatIso(F, G, comps, r, check=False)


def find_equivalence(F: GFunctor, budget: int = DEFAULT_BUDGET,
                     hints: Sequence[Term] = ()) -> EquivData | NotFoundWithinBudget:
    """Equivalence data for ``F``.

    The quasi-inverse is assembled from choices ``β_y: F(x_y) ≅ y`` with
    ``Fi`` on morphisms and ``α`` given by unique preimages, so
    ``F(α_x) = β_{F x}``.  Realizers come from :func:`find_tracker`, trying
    ``hints`` before enumeration; failure there is reported as budget
    exhaustion."""
    X, Y = F.src, F.dst
    pre: dict = {}
    for g in X.morphisms:
        key = (X.dom[g], X.cod[g], F.mor[g])
        if pre.setdefault(key, g) != g:
            return NotFoundWithinBudget("not faithful on carriers", carrier_level=True)
    xs, beta = {}, {}
    for y in Y.objects:
        exact = [x for x in X.objects if F.ob[x] == y]
        if exact:
            xs[y], beta[y] = exact[0], Y.ident[y]
            continue
        for x in X.objects:
            hs = Y.hom(F.ob[x], y)
            if hs:
                xs[y], beta[y] = x, hs[0]
                break
        else:
            return NotFoundWithinBudget(f"no object is sent near {y!r}", carrier_level=True)
    fi_mor = {}
    for f in Y.morphisms:
        y, y2 = Y.dom[f], Y.cod[f]
        want = Y.chain([beta[y], f, Y.inv[beta[y2]]])
        g = pre.get((xs[y], xs[y2], want))
        if g is None:
            return NotFoundWithinBudget(f"not full at {f!r}", carrier_level=True)
        fi_mor[f] = g
    Fi = GFunctor(Y, X, xs, fi_mor, name="Fi")
    Fi = _realized(Fi, budget, hints)
    if Fi is None:
        return NotFoundWithinBudget("no realizer for the quasi-inverse within budget", len(enumerate_terms(budget)))
    alpha_c = {}
    for x in X.objects:
        g = pre.get((xs[F.ob[x]], x, beta[F.ob[x]]))
        if g is None:
            return NotFoundWithinBudget(f"not full at {beta[F.ob[x]]!r}", carrier_level=True)
        alpha_c[x] = g
    alpha = _realized_iso(Fi.compose(F), identity_functor(X), alpha_c, budget, hints)
    b = _realized_iso(F.compose(Fi), identity_functor(Y), beta, budget, hints)
    if alpha is None or b is None:
        return NotFoundWithinBudget("no realizer for the unit or counit within budget", len(enumerate_terms(budget)))
    return EquivData(F, Fi, alpha, b)


def equivalence_witness(data: EquivData) -> RegEqWitness:
    """Regular-equivalence realizers built from equivalence data."""
    X = data.F.src
    Xr = X.realizers
    z = _v("z")
    ra, rb = data.alpha.realizer, data.beta.realizer
    ess = lam("z", _pair(App(data.Fi.r_o, z), App(rb, z)))
    a, a2, t = _p0(_p0(z)), _p1(_p0(z)), _p1(z)
    back = App(Xr.inv, App(ra, a))
    ful = lam("z", App(Xr.comp, _pair(App(Xr.comp, _pair(back, App(data.Fi.r_m, t))), App(ra, a2))))
    return RegEqWitness(ess, ful, I)


# -------------------------------------------------- regular equivalences

def _inputs(A: Assembly, x: Label) -> tuple[list[Term], bool]:
    items = enumerate_set(A.real(x))
    if items is None:
        return [A.witness(x)], True
    return items, False


def verify_regular_equivalence(F: GFunctor, w: RegEqWitness, fuel: int | None = None) -> Tri:
    """Check the three realized propositions by evaluation and membership."""
    X, Y = F.src, F.dst
    # witnesses chain several lookup tables, hence the extra headroom
    fuel = fuel or 4 * max(X.fuel, Y.fuel)
    failures: list[str] = []
    pending = None
    approx = False

    def run(t: Term, arg: Term):
        nonlocal pending
        out = evaluate(App(t, arg), fuel)
        if isinstance(out, OutOfFuel):
            pending = pending or f"out of fuel on {arg!r}"
            return None
        return out.result

    def inside(A: Assembly, p: Label, t: Term) -> bool:
        nonlocal pending
        m = member(A.real(p), t, fuel)
        if m.is_unknown:
            pending = pending or m.reason
        return m.is_yes

    # essential surjectivity
    for y in Y.objects:
        bs, ap = _inputs(Y.obj, y)
        approx |= ap
        for b in bs:
            v = run(w.ess, b)
            if v is None:
                continue
            pr = unpair(v)
            ok = pr is not None and any(
                inside(X.obj, x, pr[0]) and any(inside(Y.mor, f, pr[1]) for f in Y.hom(F.ob[x], y))
                for x in X.objects)
            if not ok:
                failures.append(f"ess: no preimage witnessed for {y!r}")
    # fullness
    for x in X.objects:
        as_, ap = _inputs(X.obj, x)
        approx |= ap
        for x2 in X.objects:
            as2, ap2 = _inputs(X.obj, x2)
            approx |= ap2
            for f in Y.hom(F.ob[x], F.ob[x2]):
                ts, ap3 = _inputs(Y.mor, f)
                approx |= ap3
                gs = [g for g in X.hom(x, x2) if F.mor[g] == f]
                for a in as_:
                    for a2 in as2:
                        for t in ts:
                            v = run(w.ful, mk_pair(mk_pair(a, a2), t))
                            if v is None:
                                continue
                            if not any(inside(X.mor, g, v) for g in gs):
                                failures.append(f"ful: no lift of {f!r} between {x!r} and {x2!r}")
    # faithfulness: carrier injectivity, and fai must be total on morphism realizers
    for x in X.objects:
        for x2 in X.objects:
            seen: dict = {}
            for g in X.hom(x, x2):
                if seen.setdefault(F.mor[g], g) != g:
                    failures.append(f"fai: {g!r} and {seen[F.mor[g]]!r} are identified")
    for g in X.morphisms:
        ts, ap = _inputs(X.mor, g)
        approx |= ap
        for t in ts:
            run(w.fai, t)
    if failures:
        return no(failures[0], failures)
    if pending:
        return unknown(pending)
    return yes(approx)


# ------------------------------------------------------------- Part / atom

class PartGroupoid(GroupoidAssembly):
    """``Part(G)``: objects ``(x, a)`` with ``a`` a realizer of ``x``."""

    base: GroupoidAssembly
    over: dict


def part(G: GroupoidAssembly) -> PartGroupoid:
    objs, oreal, over = [], {}, {}
    for x in G.objects:
        items = enumerate_set(G.obj.real(x))
        if items is None:
            raise StructuralError(f"realizers of {x!r} are not enumerable")
        over[x] = []
        for a in items:
            o = Key((x, a))
            objs.append(o)
            over[x].append(o)
            oreal[o] = Fin([a])
    mors, mreal, mwit, dom, cod = [], {}, {}, {}, {}
    for f in G.morphisms:
        for o in over[G.dom[f]]:
            for o2 in over[G.cod[f]]:
                m = Key((o, o2, f))
                mors.append(m)
                mreal[m] = PairOf(PairOf(oreal[o], oreal[o2]), G.mor.real(f))
                mwit[m] = mk_pair(mk_pair(o[1], o2[1]), G.mor.witness(f))
                dom[m], cod[m] = o, o2
    index = {(m[0], m[1], m[2]): m for m in mors}
    out: dict = {}
    for m in mors:
        out.setdefault(m[0], []).append(m)
    comp = {}
    for m in mors:
        for n in out.get(m[1], ()):
            comp[(n, m)] = index[(m[0], n[1], G.comp[(n[2], m[2])])]
    ident = {o: index[(o, o, G.ident[o[0]])] for o in objs}
    inv = {m: index[(m[1], m[0], G.inv[m[2]])] for m in mors}
    fuel = G.fuel
    O = Assembly(objs, oreal, {o: o[1] for o in objs}, fuel=fuel, trusted=True)
    M = Assembly(mors, mreal, mwit, fuel=fuel, trusted=True)

    def build() -> StructureRealizers:
        Gr = G.realizers
        z = _v("z")
        d = lam("z", _p0(_p0(z)))
        c = lam("z", _p1(_p0(z)))
        i = lam("z", _pair(_pair(z, z), App(Gr.id, z)))
        com = lam("z", _pair(_pair(App(d, _p0(z)), App(c, _p1(z))),
                             App(Gr.comp, _pair(_p1(_p0(z)), _p1(_p1(z))))))
        iv = lam("z", _pair(_pair(App(c, z), App(d, z)), App(Gr.inv, _p1(z))))
        return StructureRealizers(d, c, i, com, iv)

    # the laws are inherited from G, so the tables are not re-checked
    P = PartGroupoid(O, M, dom, cod, ident, comp, inv, build, infer_decoder(O), infer_decoder(M),
                     name=f"Part({G.name or 'G'})", check=False)
    P.base, P.over = G, over
    return P


def part_functor(F: GFunctor, PG: PartGroupoid | None = None, PH: PartGroupoid | None = None,
                 r_o: Term | None = None, r_m: Term | None = None) -> GFunctor:
    """``Part(F, r_o)``: ``(x, a) ↦ (F x, r_o·a)``, identity on morphism labels."""
    PG = PG or part(F.src)
    PH = PH or part(F.dst)
    r_o = r_o or F.r_o
    r_m = r_m or F.r_m
    if r_o is None or r_m is None:
        raise FunctorError("Part(F) needs realizers for F")
    fuel = max(F.src.fuel, F.dst.fuel)
    ob = {}
    for o in PG.objects:
        out = evaluate(App(r_o, o[1]), fuel)
        if isinstance(out, OutOfFuel):
            raise FunctorError(f"r_o diverges on {o[1]!r}")
        target = Key((F.ob[o[0]], out.result))
        if target not in PH.obj:
            raise FunctorError(f"r_o does not realize F at {o[0]!r}")
        ob[o] = target
    mor = {m: Key((ob[m[0]], ob[m[1]], F.mor[m[2]])) for m in PG.morphisms}
    z = _v("z")
    Pr = PG.realizers
    rm = lam("z", _pair(_pair(App(r_o, App(Pr.dom, z)), App(r_o, App(Pr.cod, z))), App(r_m, _p1(z))))
    return GFunctor(PG, PH, ob, mor, r_o, rm, name="Part(F)")


def atom(G: GroupoidAssembly, PG: PartGroupoid | None = None) -> tuple[GFunctor, RegEqWitness]:
    """``atom_G: Part(G) → G`` with its regular-equivalence realizers."""
    PG = PG or part(G)
    F = GFunctor(PG, G, {o: o[0] for o in PG.objects}, {m: m[2] for m in PG.morphisms}, I, P1,
                 check=False, name="atom")
    z = _v("z")
    ess = lam("z", _pair(z, App(G.realizers.id, z)))
    return F, RegEqWitness(ess, I, I)


def a_diff_groupoid() -> GroupoidAssembly:
    """Discrete on ``k, s, i``; each object is realized by the other two
    combinators.  ``atom`` is a regular equivalence here but no realized
    quasi-inverse exists: it would send ``k`` to one realizer shared by
    ``{s, i}`` and ``{k, i}``, forcing ``i``, which does not realize ``i``."""
    base = {"k": K, "s": S, "i": I}
    everything = Fin(list(base.values()))
    real = {x: Inter(Compl(Fin([a])), everything) for x, a in base.items()}
    wit = {"k": S, "s": K, "i": K}
    O = Assembly(list(base), real, wit)
    M = Assembly(list(base), real, wit)
    r = StructureRealizers(I, I, I, lam("z", _p0(_v("z"))), I)
    idm = {x: x for x in base}
    return GroupoidAssembly(O, M, idm, idm, idm, {(x, x): x for x in base}, idm, r, name="A_diff")


# ------------------------------------------------------------------ Clus

@dataclass(frozen=True)
class ClusSpec:
    family: tuple

    def __post_init__(self) -> None:
        fam = []
        for U in self.family:
            U = tuple(dict.fromkeys(U))
            if not U:
                raise ValueError("every set in a Clus family must be nonempty")
            if U not in fam:
                fam.append(U)
        object.__setattr__(self, "family", tuple(fam))

    def index(self, U: Sequence[Term]) -> int:
        return self.family.index(tuple(dict.fromkeys(U)))


def nabla_u(U: Sequence[Term]) -> GroupoidAssembly:
    """The codiscrete groupoid on ``U`` with singleton realizers."""
    U = tuple(dict.fromkeys(U))
    if not U:
        raise ValueError("U must be nonempty")
    mors = [Key((u, v)) for u in U for v in U]
    O = Assembly(U, {u: Fin([u]) for u in U}, {u: u for u in U}, trusted=True)
    M = Assembly(mors, {m: PairOf(Fin([m[0]]), Fin([m[1]])) for m in mors},
                 {m: mk_pair(m[0], m[1]) for m in mors}, trusted=True)
    z = _v("z")
    r = StructureRealizers(P0, P1, lam("z", _pair(z, z)), lam("z", _pair(_p0(_p0(z)), _p1(_p1(z)))),
                           lam("z", _pair(_p1(z), _p0(z))))
    index = {(m[0], m[1]): m for m in mors}
    comp = {(index[(v, w)], index[(u, v)]): index[(u, w)] for u in U for v in U for w in U}
    return GroupoidAssembly(O, M, {m: m[0] for m in mors}, {m: m[1] for m in mors},
                            {u: index[(u, u)] for u in U}, comp, {m: index[(m[1], m[0])] for m in mors},
                            r, infer_decoder(O), infer_decoder(M), name="∇U", check=False)


class ClusGroupoid(GroupoidAssembly):
    """``Clus(G)`` over a finite family.  Objects are ``(k, key)`` for a
    realized functor ``∇(U_k) → G``; a morphism ``P → Q`` is labelled by its
    value ``H(u₀, u₀')`` at the first elements, which determines it."""

    spec: ClusSpec
    nablas: list
    functor_of: dict
    base: GroupoidAssembly

    @property
    def fuel(self) -> int:
        # realizers embed functor realizers, which may be lookups over large sources
        return 4 * super().fuel

    def table(self, H: Label) -> dict:
        """All values ``H(u, u')``."""
        P, Q, h = H
        F, F2 = self.functor_of[P], self.functor_of[Q]
        U, U2 = self.nablas[P[0]].objects, self.nablas[Q[0]].objects
        G = self.base
        out = {}
        for v in U:
            for v2 in U2:
                out[(v, v2)] = G.chain([F.mor[Key((v, U[0]))], h, F2.mor[Key((U2[0], v2))]])
        return out

    def evaluation(self) -> tuple[Term, Term]:
        """Realizers evaluating an object at its chosen point and a morphism
        at the chosen points of its ends; useful hints for searches out of
        ``Clus``."""
        z = _v("z")
        r_o = lam("z", App(_p0(_p0(z)), _p1(z)))
        r_m = lam("z", App(_p1(z), _pair(_p1(_p0(_p0(z))), _p1(_p1(_p0(z))))))
        return r_o, r_m

    def object_for(self, k: int, F: GFunctor) -> Label:
        return Key((k, F.key))

    def morphism_for(self, P: Label, Q: Label, values: Mapping) -> Label:
        U, U2 = self.nablas[P[0]].objects, self.nablas[Q[0]].objects
        return Key((P, Q, values[(U[0], U2[0])]))


def clus_fin(G: GroupoidAssembly, spec: ClusSpec, budget: int = DEFAULT_BUDGET) -> ClusGroupoid:
    nablas = [nabla_u(U) for U in spec.family]
    objs, oreal, owit, functor_of = [], {}, {}, {}
    for k, N in enumerate(nablas):
        for F in functors(N, G):
            F = _realized(F, budget)
            if F is None:
                continue
            P = Key((k, F.key))
            objs.append(P)
            functor_of[P] = F
            oreal[P] = PairOf(functor_realizer_set(N, G, F), Fin(N.objects))
            owit[P] = mk_pair(mk_pair(F.r_o, F.r_m), N.objects[0])
    mors, dom, cod = [], {}, {}
    for P in objs:
        F, U = functor_of[P], nablas[P[0]].objects
        for Q in objs:
            F2, U2 = functor_of[Q], nablas[Q[0]].objects
            for h in G.hom(F.ob[U[0]], F2.ob[U2[0]]):
                H = Key((P, Q, h))
                mors.append(H)
                dom[H], cod[H] = P, Q
    C = ClusGroupoid.__new__(ClusGroupoid)
    C.spec, C.nablas, C.functor_of, C.base = spec, nablas, functor_of, G
    mreal, mwit = {}, {}
    for H in mors:
        P, Q, _ = H
        values = C.table(H)
        pairs = [(mk_pair(u, v), G.mor.real(values[(u, v)])) for (u, v) in values]
        hset = Imp([([k], R) for k, R in pairs])
        mreal[H] = PairOf(PairOf(oreal[P], oreal[Q]), hset)
        src = Assembly([mk_pair(u, v) for (u, v) in values], {mk_pair(u, v): Fin([mk_pair(u, v)]) for (u, v) in values},
                       trusted=True)
        mp = {mk_pair(u, v): values[(u, v)] for (u, v) in values}
        t = find_tracker(src, G.mor, mp, budget, fuel=G.fuel)
        if t is None:
            raise StructuralError(f"no realizer found for the Clus morphism {H!r}")
        mwit[H] = mk_pair(mk_pair(owit[P], owit[Q]), t)
    index = {(H[0], H[1], H[2]): H for H in mors}
    out: dict = {}
    for H in mors:
        out.setdefault(H[0], []).append(H)
    comp = {}
    for H in mors:
        for J in out.get(H[1], ()):
            comp[(J, H)] = index[(H[0], J[1], G.comp[(J[2], H[2])])]
    ident = {}
    for P in objs:
        F, U = functor_of[P], nablas[P[0]].objects
        ident[P] = index[(P, P, G.ident[F.ob[U[0]]])]
    inv = {H: index[(H[1], H[0], G.inv[H[2]])] for H in mors}
    fuel = 4 * G.fuel
    O = Assembly(objs, oreal, owit, fuel=fuel)
    M = Assembly(mors, mreal, mwit, fuel=fuel)

    def build() -> StructureRealizers:
        Gr = G.realizers
        z, w = _v("z"), _v("w")
        d = lam("z", _p0(_p0(z)))
        c = lam("z", _p1(_p0(z)))
        i = lam("z", _pair(_pair(z, z), _p1(_p0(z))))
        iv = lam("z", _pair(_pair(_p1(_p0(z)), _p0(_p0(z))),
                            lam("w", App(Gr.inv, App(_p1(z), _pair(_p1(w), _p0(w)))))))
        first, second = _p0(z), _p1(z)
        mid = _p1(_p1(_p0(first)))
        com = lam("z", _pair(_pair(_p0(_p0(first)), _p1(_p0(second))),
                             lam("w", App(Gr.comp, _pair(App(_p1(first), _pair(_p0(w), mid)),
                                                         App(_p1(second), _pair(mid, _p1(w))))))))
        return StructureRealizers(d, c, i, com, iv)

    GroupoidAssembly.__init__(C, O, M, dom, cod, ident, comp, inv, build, name=f"Clus({G.name or 'G'})")
    return C


def family_of(E: GroupoidAssembly) -> ClusSpec:
    """The realizer sets of the objects of ``E``."""
    fam = []
    for e in E.objects:
        items = enumerate_set(E.obj.real(e))
        if items is None:
            raise StructuralError(f"realizers of {e!r} are not enumerable")
        fam.append(tuple(items))
    return ClusSpec(tuple(fam))


def clus_transpose(f: GFunctor, C: ClusGroupoid | None = None) -> GFunctor:
    """``α(f): E → Clus(F)`` for ``f: Part(E) → F``."""
    PE = f.src
    if not isinstance(PE, PartGroupoid):
        raise FunctorError("clus_transpose expects a functor out of Part(E)")
    E, Fg = PE.base, f.dst
    C = C or clus_fin(Fg, family_of(E))
    ob, parts = {}, {}
    for e in E.objects:
        U = [o[1] for o in PE.over[e]]
        k = C.spec.index(U)
        N = C.nablas[k]
        ide = E.ident[e]
        fe = GFunctor(N, Fg, {r: f.ob[Key((e, r))] for r in N.objects},
                      {m: f.mor[Key((Key((e, m[0])), Key((e, m[1])), ide))] for m in N.morphisms}, check=False)
        ob[e] = C.object_for(k, fe)
        parts[e] = N
    mor = {}
    for t in E.morphisms:
        e, e2 = E.dom[t], E.cod[t]
        values = {(r, r2): f.mor[Key((Key((e, r)), Key((e2, r2)), t))]
                  for r in parts[e].objects for r2 in parts[e2].objects}
        mor[t] = C.morphism_for(ob[e], ob[e2], values)
    if f.r_o is None or f.r_m is None:
        raise FunctorError("clus_transpose needs realizers for f")
    Er = E.realizers
    r, t, w = _v("r"), _v("t"), _v("w")
    # r ↦ [[f_o, w ↦ f_m·[w, id·r]], r]
    r_o = lam("r", _pair(_pair(f.r_o, lam("w", App(f.r_m, _pair(w, App(Er.id, r))))), r))
    r_m = lam("t", _pair(_pair(App(r_o, App(Er.dom, t)), App(r_o, App(Er.cod, t))),
                         lam("w", App(f.r_m, _pair(w, t)))))
    return GFunctor(E, C, ob, mor, r_o, r_m, name="α(f)")


def clus_untranspose(g: GFunctor, PE: PartGroupoid | None = None) -> GFunctor:
    """``g′: Part(E) → F`` with ``g′(e, r) = g(e)(p₁·(r_g·r))``."""
    E, C = g.src, g.dst
    if not isinstance(C, ClusGroupoid):
        raise FunctorError("clus_untranspose expects a functor into a Clus groupoid")
    PE = PE or part(E)
    Fg = C.base
    rg, rgm = g.r_o, g.r_m
    if rg is None or rgm is None:
        raise FunctorError("clus_untranspose needs realizers for g")
    fuel = max(E.fuel, C.fuel)

    def point(o) -> Term:
        out = evaluate(App(P1, App(rg, o[1])), fuel)
        if isinstance(out, OutOfFuel):
            raise FunctorError(f"realizer of g diverges on {o[1]!r}")
        return out.result

    u = {o: point(o) for o in PE.objects}
    ob = {o: C.functor_of[g.ob[o[0]]].ob[u[o]] for o in PE.objects}
    mor = {}
    for m in PE.morphisms:
        o, o2, t = m
        mor[m] = C.table(g.mor[t])[(u[o], u[o2])]
    z = _v("z")
    r_o = lam("z", App(_p0(_p0(App(rg, z))), _p1(App(rg, z))))
    r_m = lam("z", App(_p1(App(rgm, _p1(z))), _pair(_p1(App(rg, _p0(_p0(z)))), _p1(App(rg, _p1(_p0(z)))))))
    # the realizers run through those of g, so they inherit its fuel needs
    return GFunctor(PE, Fg, ob, mor, r_o, r_m, name="g′", fuel=max(g.fuel, PE.fuel))


# ------------------------------------------------------ type predicates

def is_zero_type(X: GroupoidAssembly) -> bool:
    return all(len(X.hom(x, y)) <= 1 for x in X.objects for y in X.objects)


def is_neg_one_type(X: GroupoidAssembly) -> bool:
    return all(len(X.hom(x, y)) == 1 for x in X.objects for y in X.objects)


def is_discrete(X: GroupoidAssembly) -> bool:
    return all(X.is_identity(m) for m in X.morphisms)


def is_modest_grpd(X: GroupoidAssembly) -> bool:
    return is_modest(X.obj).is_yes and is_modest(X.mor).is_yes


# ------------------------------------------------------------ truncations

def truncate0(X: GroupoidAssembly) -> tuple[GroupoidAssembly, GFunctor]:
    """Collapse parallel morphisms; a class is realized by every realizer
    of its members, so the structure realizers of ``X`` still work."""
    classes: dict = {}
    for f in X.morphisms:
        classes.setdefault((X.dom[f], X.cod[f]), []).append(f)
    mors = [Key(k) for k in classes]
    M = Assembly(mors, {k: union_all([X.mor.real(f) for f in classes[tuple(k)]]) for k in mors},
                 {k: X.mor.witness(classes[tuple(k)][0]) for k in mors}, fuel=X.fuel)
    comp = {(Key((y, z)), Key((x, y))): Key((x, z))
            for (x, y) in classes for (y2, z) in classes if y2 == y}
    ident = {x: Key((x, x)) for x in X.objects}
    inv = {k: Key((k[1], k[0])) for k in mors}
    cls_index = {k: i for i, k in enumerate(mors)}
    mdec = None
    if X.mor_dec is not None:
        mdec = table_map(X.mor_dec, [church(cls_index[(X.dom[f], X.cod[f])]) for f in X.morphisms])
    T = GroupoidAssembly(X.obj, M, {k: k[0] for k in mors}, {k: k[1] for k in mors}, ident, comp, inv,
                         lambda: X.realizers, X.obj_dec, mdec, name=f"τ₀({X.name or 'X'})")
    unit = GFunctor(X, T, {x: x for x in X.objects}, {f: Key((X.dom[f], X.cod[f])) for f in X.morphisms}, I, I)
    return T, unit


def truncate_neg1(X: GroupoidAssembly) -> tuple[GroupoidAssembly, GFunctor]:
    """Codiscrete groupoid on the objects of ``X``; ``(x, y)`` is realized
    by pairs of object realizers."""
    mors = [Key((x, y)) for x in X.objects for y in X.objects]
    M = Assembly(mors, {k: PairOf(X.obj.real(k[0]), X.obj.real(k[1])) for k in mors},
                 {k: mk_pair(X.obj.witness(k[0]), X.obj.witness(k[1])) for k in mors}, fuel=X.fuel, trusted=True)
    comp = {(Key((y, z)), Key((x, y))): Key((x, z)) for x in X.objects for y in X.objects for z in X.objects}
    z = _v("z")
    r = StructureRealizers(P0, P1, lam("z", _pair(z, z)), lam("z", _pair(_p0(_p0(z)), _p1(_p1(z)))),
                           lam("z", _pair(_p1(z), _p0(z))))
    mdec = None
    if X.obj_dec is not None:
        n = len(X.objects)
        rows = [table_map(X.obj_dec, [church(i * n + j) for j in range(n)]) for i in range(n)]
        mdec = lam("z", App(App(table_map(X.obj_dec, rows), _p0(z)), _p1(z)))
    T = GroupoidAssembly(X.obj, M, {k: k[0] for k in mors}, {k: k[1] for k in mors},
                         {x: Key((x, x)) for x in X.objects}, comp, {k: Key((k[1], k[0])) for k in mors}, r,
                         X.obj_dec, mdec, name=f"τ₋₁({X.name or 'X'})")
    Xr = X.realizers
    r_m = lam("z", _pair(App(Xr.dom, z), App(Xr.cod, z)))
    unit = GFunctor(X, T, {x: x for x in X.objects}, {f: Key((X.dom[f], X.cod[f])) for f in X.morphisms}, I, r_m)
    return T, unit


__all__ = [
    "NotFoundWithinBudget", "EquivData", "RegEqWitness", "find_tracker", "find_equivalence",
    "equivalence_witness", "verify_regular_equivalence", "PartGroupoid", "part", "part_functor", "atom",
    "a_diff_groupoid",
    "ClusSpec", "nabla_u", "ClusGroupoid", "clus_fin", "family_of", "clus_transpose", "clus_untranspose",
    "is_zero_type", "is_neg_one_type", "is_discrete", "is_modest_grpd", "truncate0", "truncate_neg1",
]
