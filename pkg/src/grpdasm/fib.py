"""Fibration calculus for groupoid assemblies.

Normal isofibrations carry an explicit lift table, strong deformation
sections carry a retraction and a natural isomorphism, and the lifting,
transport, Frobenius, pullback-power and dependent-product constructions are
computed on carriers.  Functors built here are realized by lookup tables
whenever their source is indexed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _cartesian
from typing import Hashable, Iterator, Mapping

from .asm import Assembly, AsmMorphism
from .grpd import (
    Exponential, FunctorError, Key, GFunctor, GroupoidAssembly, NatIso, exponential, functors, hom, identity_functor,
    functor_failures, iter_functor_maps, iter_natisos, PathObject, natiso_failures, tabulate,
)
from .pca import P0, P1, App, Var, ap, lam, mk_pair, std
from .rset import PairOf

Label = Hashable


class LiftError(ValueError):
    pass


# --------------------------------------------------------------- squares

def squares(i: GFunctor, f: GFunctor) -> Assembly:
    """``Sq(i, f)``: pairs ``(u, v)`` with ``u: A → X``, ``v: B → Y`` and
    ``f∘u = v∘i``, realized as pairs of functor realizers."""
    HAX, HBY = hom(i.src, f.src), hom(i.dst, f.dst)
    pairs = [(u, v) for u in HAX.carrier for v in HBY.carrier if f.compose(u).same_as(v.compose(i))]
    return Assembly(pairs, lambda p: PairOf(HAX.real(p[0]), HBY.real(p[1])),
                    lambda p: mk_pair(HAX.witness(p[0]), HBY.witness(p[1])), fuel=max(i.src.fuel, i.dst.fuel, f.src.fuel, f.dst.fuel))


def _pair_term(a, b):
    return ap(std("pair"), a, b)


def pullp(i: GFunctor, f: GFunctor, sq: Assembly | None = None) -> AsmMorphism:
    """``Hom(B, X) → Sq(i, f)``, ``z ↦ (z∘i, f∘z)``."""
    sq = squares(i, f) if sq is None else sq
    HBX = hom(i.dst, f.src)
    index = {(u.key, v.key): (u, v) for u, v in sq.carrier}
    mapping = {z: index[(z.compose(i).key, f.compose(z).key)] for z in HBX.carrier}
    z, a = Var("z"), Var("a")
    zo, zm = App(P0, z), App(P1, z)
    pre = _pair_term(lam("a", App(zo, App(i.r_o, a))), lam("a", App(zm, App(i.r_m, a))))
    post = _pair_term(lam("a", App(f.r_o, App(zo, a))), lam("a", App(f.r_m, App(zm, a))))
    return AsmMorphism(HBX, sq, mapping, lam("z", _pair_term(pre, post)), validate=False)


# ------------------------------------------------------ normal isofibrations

class FibrationWitness:
    """A lift table for ``F``: ``lift(x, p)`` is a morphism out of ``x``
    sent by ``F`` to ``p``, with identities lifted to identities."""

    def __init__(self, F: GFunctor, table: Mapping[tuple, Label], check: bool = True) -> None:
        self.F = F
        self.table = dict(table)
        self._fibers: dict = {}
        if check:
            bad = self.failures()
            if bad:
                raise LiftError(bad[0])

    def lift(self, x: Label, p: Label) -> Label:
        return self.table[(x, p)]

    def target(self, x: Label, p: Label) -> Label:
        return self.F.src.cod[self.table[(x, p)]]

    def failures(self) -> list[str]:
        F, X, Y = self.F, self.F.src, self.F.dst
        out = []
        for x in X.objects:
            for p in Y.out[F.ob[x]]:
                m = self.table.get((x, p))
                if m is None:
                    out.append(f"no lift of {p!r} at {x!r}")
                elif X.dom[m] != x or F.mor[m] != p:
                    out.append(f"lift of {p!r} at {x!r} is {m!r}, which does not lie over it")
            if (x, Y.ident[F.ob[x]]) in self.table and self.table[(x, Y.ident[F.ob[x]])] != X.ident[x]:
                out.append(f"identity at {x!r} is not lifted to the identity")
        return out

    # -- fibers and transport
    def fiber(self, b: Label) -> tuple[GroupoidAssembly, GFunctor]:
        """``F⁻¹(b)`` and its inclusion into the source."""
        if b not in self._fibers:
            self._fibers[b] = fiber(self.F, b)
        return self._fibers[b]

    def transport(self, p: Label) -> GFunctor:
        """``lift(p): F⁻¹(b) → F⁻¹(b')`` for ``p: b → b'``."""
        Y, X = self.F.dst, self.F.src
        b, b2 = Y.dom[p], Y.cod[p]
        S, _ = self.fiber(b)
        T, _ = self.fiber(b2)
        ob = {a: self.target(a, p) for a in S.objects}
        mor = {}
        for m in S.morphisms:
            l0, l1 = self.lift(X.dom[m], p), self.lift(X.cod[m], p)
            mor[m] = X.chain([X.inv[l0], m, l1])
        return GFunctor(S, T, ob, mor)

    def coherence(self, p: Label, p2: Label) -> NatIso:
        """``lift(p2)∘lift(p) ≅ lift(p2∘p)``."""
        X, Y = self.F.src, self.F.dst
        first, second = self.transport(p), self.transport(p2)
        whole = self.transport(Y.comp[(p2, p)])
        comps = {}
        for a in first.src.objects:
            l0 = self.lift(a, p)
            l1 = self.lift(first.ob[a], p2)
            comps[a] = X.chain([X.inv[l1], X.inv[l0], self.lift(a, Y.comp[(p2, p)])])
        return NatIso(second.compose(first), whole, comps)


def fiber(F: GFunctor, b: Label) -> tuple[GroupoidAssembly, GFunctor]:
    X = F.src
    e = F.dst.ident[b]
    objs = [x for x in X.objects if F.ob[x] == b]
    mors = [m for m in X.morphisms if F.mor[m] == e]
    keep = set(mors)
    comp = {k: v for k, v in X.comp.items() if k[0] in keep and k[1] in keep}
    G = tabulate(objs, mors, X.dom, X.cod, comp, {x: X.ident[x] for x in objs}, {m: X.inv[m] for m in mors},
                 name=f"fiber({b!r})")
    return G, GFunctor(G, X, {x: x for x in objs}, {m: m for m in mors})


def find_normal_isofib(F: GFunctor) -> FibrationWitness | None:
    """The canonical lift table (first lift in enumeration order, identities
    forced), or ``None`` when some morphism has no lift."""
    X, Y = F.src, F.dst
    table = {}
    for x in X.objects:
        for p in Y.out[F.ob[x]]:
            if p == Y.ident[F.ob[x]]:
                table[(x, p)] = X.ident[x]
                continue
            m = next((m for m in X.out[x] if F.mor[m] == p), None)
            if m is None:
                return None
            table[(x, p)] = m
    return FibrationWitness(F, table)


# ------------------------------------------------------ strong deformations

@dataclass
class Report:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class SDSData:
    """A retraction ``r`` of ``j`` and ``β: j∘r ⇒ id``."""
    retraction: GFunctor
    beta: Mapping[Label, Label]


@dataclass
class SDRData:
    """A section ``s`` of ``F`` and ``α: s∘F ⇒ id``."""
    section: GFunctor
    alpha: Mapping[Label, Label]


def _natiso_check(F: GFunctor, G: GFunctor, comps: Mapping, what: str) -> list[str]:
    try:
        a = NatIso(F, G, comps, check=False)
    except (KeyError, FunctorError) as e:
        return [f"{what}: {e}"]
    return [f"{what}: {msg}" for msg in natiso_failures(a)]


def verify_sds(j: GFunctor, data: SDSData) -> Report:
    A, B = j.src, j.dst
    r = data.retraction
    out = []
    if r.src is not B or r.dst is not A:
        return Report(["retraction has the wrong type"])
    out += [f"j: {msg}" for msg in functor_failures(j)] + [f"r: {msg}" for msg in functor_failures(r)]
    if out:
        return Report(out)
    for a in A.objects:
        if r.ob[j.ob[a]] != a:
            out.append(f"r(j({a!r})) ≠ {a!r}")
    for m in A.morphisms:
        if r.mor[j.mor[m]] != m:
            out.append(f"r(j({m!r})) ≠ {m!r}")
    out += _natiso_check(j.compose(r), identity_functor(B), data.beta, "β")
    for a in A.objects:
        if data.beta.get(j.ob[a]) != B.ident[j.ob[a]]:
            out.append(f"β·j ≠ j·α at {a!r}")
    return Report(out)


def verify_sdr(F: GFunctor, data: SDRData) -> Report:
    A, B = F.src, F.dst
    s = data.section
    out = []
    if s.src is not B or s.dst is not A:
        return Report(["section has the wrong type"])
    out += [f"F: {msg}" for msg in functor_failures(F)] + [f"s: {msg}" for msg in functor_failures(s)]
    if out:
        return Report(out)
    for b in B.objects:
        if F.ob[s.ob[b]] != b:
            out.append(f"F(s({b!r})) ≠ {b!r}")
    for m in B.morphisms:
        if F.mor[s.mor[m]] != m:
            out.append(f"F(s({m!r})) ≠ {m!r}")
    out += _natiso_check(s.compose(F), identity_functor(A), data.alpha, "α")
    for a in A.objects:
        if F.mor[data.alpha.get(a, A.ident[a])] != B.ident[F.ob[a]]:
            out.append(f"β·F ≠ F·α at {a!r}")
    return Report(out)


def find_sds(j: GFunctor) -> SDSData | None:
    """Exhaustive search for SDS data on ``j``; ``None`` means there is none."""
    A, B = j.src, j.dst
    fixed: dict = {}
    for a in A.objects:
        if fixed.setdefault(j.ob[a], a) != a:
            return None
    for ob, mor in iter_functor_maps(B, A, ob=fixed):
        if any(mor[j.mor[m]] != m for m in A.morphisms):
            continue
        r = GFunctor(B, A, ob, mor, check=False)
        for beta in iter_natisos(j.compose(r), identity_functor(B)):
            if all(beta.component[j.ob[a]] == B.ident[j.ob[a]] for a in A.objects):
                return SDSData(r, beta.component)
    return None


def identity_sds(G: GroupoidAssembly) -> tuple[GFunctor, SDSData]:
    e = identity_functor(G)
    return e, SDSData(e, {x: G.ident[x] for x in G.objects})


def path_sds(po: PathObject) -> SDSData:
    """``σ`` with retraction ``d0`` and ``β(p) = (id, p): const ⇒ p``."""
    ex, X = po.exponential, po.d0.dst
    beta = {}
    for p in po.groupoid.objects:
        const = po.sigma.ob[p.ob[0]]
        beta[p] = ex.natiso_point(const, p, {0: X.ident[p.ob[0]], 1: p.mor["line"]})
    return SDSData(po.d0, beta)


# ------------------------------------------------------- comma factorization

@dataclass
class CommaFactorization:
    F: GFunctor
    comma: GroupoidAssembly
    tilde: GFunctor
    hat: GFunctor
    sds: SDSData
    witness: FibrationWitness


def comma_factorize(F: GFunctor) -> CommaFactorization:
    """``F = F̂ ∘ F̃`` through the iso-comma groupoid ``(F ↓ B)``."""
    A, B = F.src, F.dst
    objs = [Key((a, b, f)) for a in A.objects for b in B.objects for f in B.hom(F.ob[a], b)]
    mors, dom, cod = [], {}, {}
    by_a: dict = {}
    for o in objs:
        by_a.setdefault(o[0], []).append(o)
    for o in objs:
        a, b, f = o
        for x in A.out[a]:
            for o2 in by_a[A.cod[x]]:
                _, b2, f2 = o2
                y = B.chain([B.inv[f], F.mor[x], f2])
                m = Key((o, o2, x, y))
                mors.append(m)
                dom[m], cod[m] = o, o2
    out_of: dict = {}
    for m in mors:
        out_of.setdefault(m[0], []).append(m)
    comp = {}
    index = {(m[0], m[1], m[2]): m for m in mors}
    for m in mors:
        for n in out_of[m[1]]:
            comp[(n, m)] = index[(m[0], n[1], A.comp[(n[2], m[2])])]
    ident = {o: index[(o, o, A.ident[o[0]])] for o in objs}
    inv = {m: index[(m[1], m[0], A.inv[m[2]])] for m in mors}
    # the laws of C and the functor laws below follow from those of A and B,
    # so the (cubic) table checks are skipped
    C = tabulate(objs, mors, dom, cod, comp, ident, inv, name=f"({F.name or 'F'}↓B)", check=False)
    base = {a: (a, F.ob[a], B.ident[F.ob[a]]) for a in A.objects}
    tilde = GFunctor(A, C, base, {x: index[(base[A.dom[x]], base[A.cod[x]], x)] for x in A.morphisms}, check=False)
    hat = GFunctor(C, B, {o: o[1] for o in objs}, {m: m[3] for m in mors}, check=False)
    retr = GFunctor(C, A, {o: o[0] for o in objs}, {m: m[2] for m in mors}, check=False)
    beta = {o: index[(base[o[0]], o, A.ident[o[0]])] for o in objs}
    table = {}
    for o in objs:
        a, b, f = o
        for g in B.out[b]:
            table[(o, g)] = index[(o, Key((a, B.cod[g], B.comp[(g, f)])), A.ident[a])]
    return CommaFactorization(F, C, tilde, hat, SDSData(retr, beta), FibrationWitness(hat, table))


# ---------------------------------------------------------------- lifting

def solve_lift(j: GFunctor, sds: SDSData, F: GFunctor, fw: FibrationWitness, s: GFunctor,
               t: GFunctor) -> GFunctor:
    """Diagonal filler of the square ``F∘s = t∘j``."""
    A, B, X = j.src, j.dst, F.src
    if s.src is not A or s.dst is not X or t.src is not B or t.dst is not F.dst:
        raise LiftError("square has the wrong shape")
    if not F.compose(s).same_as(t.compose(j)):
        raise LiftError("square does not commute")
    r, beta = sds.retraction, sds.beta
    lift0 = {b: fw.lift(s.ob[r.ob[b]], t.mor[beta[b]]) for b in B.objects}
    ob = {b: X.cod[lift0[b]] for b in B.objects}
    mor = {}
    for m in B.morphisms:
        b, b2 = B.dom[m], B.cod[m]
        mor[m] = X.chain([X.inv[lift0[b]], s.mor[r.mor[m]], lift0[b2]])
    d = GFunctor(B, X, ob, mor)
    if not d.compose(j).same_as(s):
        raise LiftError("upper triangle fails")
    if not F.compose(d).same_as(t):
        raise LiftError("lower triangle fails")
    return d


# -------------------------------------------------------------- pullbacks

@dataclass
class GPullback:
    groupoid: GroupoidAssembly
    left: GFunctor
    right: GFunctor


def pullback(f: GFunctor, g: GFunctor) -> GPullback:
    """``X ×_Y W`` for ``f: X → Y`` and ``g: W → Y`` with both projections."""
    if f.dst is not g.dst:
        raise FunctorError("pullback needs a common codomain")
    X, W = f.src, g.src
    objs = [(x, w) for x in X.objects for w in W.objects if f.ob[x] == g.ob[w]]
    mors = [(m, n) for m in X.morphisms for n in W.morphisms if f.mor[m] == g.mor[n]]
    keep = set(mors)
    dom = {p: (X.dom[p[0]], W.dom[p[1]]) for p in mors}
    cod = {p: (X.cod[p[0]], W.cod[p[1]]) for p in mors}
    comp = {}
    for p in mors:
        for q in mors:
            if cod[p] == dom[q]:
                comp[(q, p)] = (X.comp[(q[0], p[0])], W.comp[(q[1], p[1])])
    P = tabulate(objs, mors, dom, cod, comp, {o: (X.ident[o[0]], W.ident[o[1]]) for o in objs},
                 {p: (X.inv[p[0]], W.inv[p[1]]) for p in mors}, name="pullback")
    del keep
    left = GFunctor(P, X, {o: o[0] for o in objs}, {p: p[0] for p in mors}, check=False)
    right = GFunctor(P, W, {o: o[1] for o in objs}, {p: p[1] for p in mors}, check=False)
    return GPullback(P, left, right)


def frobenius(F: GFunctor, fw: FibrationWitness, j: GFunctor, sds: SDSData) -> tuple[GPullback, SDSData]:
    """Pull the deformation section ``j`` back along the isofibration ``F``;
    returns the pullback and deformation data for its projection onto the
    source of ``F``."""
    P = pullback(F, j)
    X = F.src
    r, beta = sds.retraction, sds.beta
    Y = F.dst
    back = {x: fw.lift(x, Y.inv[beta[F.ob[x]]]) for x in X.objects}
    w_ob = {x: (X.cod[back[x]], r.ob[F.ob[x]]) for x in X.objects}
    w_mor = {}
    for m in X.morphisms:
        x, x2 = X.dom[m], X.cod[m]
        w_mor[m] = (X.chain([X.inv[back[x]], m, back[x2]]), r.mor[F.mor[m]])
    w = GFunctor(X, P.groupoid, w_ob, w_mor, check=False)  # verify_sds checks the functor laws
    d = {x: X.inv[back[x]] for x in X.objects}
    return P, SDSData(w, d)


# ---------------------------------------------------------- pullback power

@dataclass
class PullbackPower:
    functor: GFunctor
    witness: FibrationWitness | None
    source: Exponential
    target: GroupoidAssembly


def _whisker_right(alpha: NatIso, i: GFunctor, dst_ex: Exponential) -> NatIso:
    """``α·i``."""
    F = dst_ex.functor_point(*_restrict(alpha.F, i))
    G = dst_ex.functor_point(*_restrict(alpha.G, i))
    return dst_ex.natiso_point(F, G, {a: alpha.component[i.ob[a]] for a in i.src.objects})


def _restrict(F: GFunctor, i: GFunctor) -> tuple[dict, dict]:
    return ({a: F.ob[i.ob[a]] for a in i.src.objects}, {m: F.mor[i.mor[m]] for m in i.src.morphisms})


def _post(F: GFunctor, f: GFunctor) -> tuple[dict, dict]:
    return ({x: f.ob[F.ob[x]] for x in F.src.objects}, {m: f.mor[F.mor[m]] for m in F.src.morphisms})


def pullback_power(i: GFunctor, f: GFunctor, fw: FibrationWitness | None = None) -> PullbackPower:
    """``i ⋔ f: (B → X) → (A → X) ×_{A → Y} (B → Y)`` and, when ``f`` is a
    normal isofibration, the lift table of the explicit construction."""
    A, B = i.src, i.dst
    X, Y = f.src, f.dst
    if len(set(i.ob.values())) != len(A.objects):
        raise ValueError("i must be injective on objects")
    BX, AX, AY, BY = exponential(B, X), exponential(A, X), exponential(A, Y), exponential(B, Y)
    post = GFunctor(AX.groupoid, AY.groupoid,
                    {F: AY.functor_point(*_post(F, f)) for F in AX.groupoid.objects},
                    {a: AY.natiso_point(AY.functor_point(*_post(a.F, f)), AY.functor_point(*_post(a.G, f)),
                                        {x: f.mor[c] for x, c in a.component.items()})
                     for a in AX.groupoid.morphisms})
    pre = GFunctor(BY.groupoid, AY.groupoid,
                   {F: AY.functor_point(*_restrict(F, i)) for F in BY.groupoid.objects},
                   {a: _whisker_right(a, i, AY) for a in BY.groupoid.morphisms})
    P = pullback(post, pre)
    Pg = P.groupoid
    ob = {s: (AX.functor_point(*_restrict(s, i)), BY.functor_point(*_post(s, f))) for s in BX.groupoid.objects}
    mor = {}
    for a in BX.groupoid.morphisms:
        left = _whisker_right(a, i, AX)
        right = BY.natiso_point(BY.functor_point(*_post(a.F, f)), BY.functor_point(*_post(a.G, f)),
                                {b: f.mor[c] for b, c in a.component.items()})
        mor[a] = (left, right)
    pf = GFunctor(BX.groupoid, Pg, ob, mor)
    witness = None
    if fw is not None:
        inv_i = {i.ob[a]: a for a in A.objects}
        table = {}
        for s in BX.groupoid.objects:
            for sig in Pg.out[ob[s]]:
                sig1, sig0 = sig  # σ₁: s∘i ≅ s₁ and σ₀: f∘s ≅ s₀
                t = {}
                for b in B.objects:
                    a0 = inv_i.get(b)
                    t[b] = sig1.component[a0] if a0 is not None else fw.lift(s.ob[b], sig0.component[b])
                s_ob = {b: X.cod[t[b]] for b in B.objects}
                s_mor = {m: X.chain([X.inv[t[B.dom[m]]], s.mor[m], t[B.cod[m]]]) for m in B.morphisms}
                s2 = BX.functor_point(s_ob, s_mor)
                table[(s, sig)] = BX.natiso_point(s, s2, t)
        witness = FibrationWitness(pf, table)
    return PullbackPower(pf, witness, BX, Pg)


# -------------------------------------------------------- dependent products

@dataclass(frozen=True, eq=False)
class GenNatTrans:
    """A family ``η(u) : T(dom u) → T'(cod u)`` for ``u`` over ``f``."""
    f: Label
    values: tuple  # (u, η(u)) pairs in morphism order

    def __post_init__(self) -> None:
        object.__setattr__(self, "_table", dict(self.values))
        object.__setattr__(self, "_h", hash((self.f, self.values)))

    def __call__(self, u: Label) -> Label:
        return self._table[u]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GenNatTrans) and self.f == other.f and self.values == other.values

    def __hash__(self) -> int:
        return self._h


@dataclass
class DependentProduct:
    """``Π_F(G)`` for an isofibration ``F: N → M`` and ``G: P → N``."""
    F: GFunctor
    G: GFunctor
    witness: FibrationWitness
    groupoid: GroupoidAssembly
    proj: GFunctor
    sections: dict  # (m, key) -> (ob map, mor map)

    def section(self, obj: tuple) -> tuple[dict, dict]:
        return self.sections[obj]

    def transpose(self, X: GFunctor, Z: GFunctor, pb: GPullback) -> GFunctor:
        """``φ(Z)`` for ``Z: D ×_M N → P`` over ``N``."""
        N, Pi = self.F.src, self.groupoid
        D = X.src
        ob = {}
        for x in D.objects:
            S, _ = self.witness.fiber(X.ob[x])
            ob[x] = Key((X.ob[x], _key({n: Z.ob[(x, n)] for n in S.objects}),
                         _key({u: Z.mor[(D.ident[x], u)] for u in S.morphisms})))
        mor = {}
        for v in D.morphisms:
            f = X.mor[v]
            eta = GenNatTrans(f, tuple((u, Z.mor[(v, u)]) for u in N.morphisms if self.F.mor[u] == f))
            mor[v] = Key((f, ob[D.dom[v]], ob[D.cod[v]], eta))
        return GFunctor(D, Pi, ob, mor)

    def untranspose(self, X: GFunctor, W: GFunctor, pb: GPullback) -> GFunctor:
        """``ψ(W): D ×_M N → P``."""
        Pg = pb.groupoid
        ob = {(x, n): self.sections[W.ob[x]][0][n] for (x, n) in Pg.objects}
        mor = {(v, u): W.mor[v][3](u) for (v, u) in Pg.morphisms}
        return GFunctor(Pg, self.G.src, ob, mor)


def _key(d: Mapping) -> tuple:
    return Key(sorted(d.items(), key=repr))


def dependent_product_fib(F: GFunctor, fw: FibrationWitness, G: GFunctor) -> DependentProduct:
    N, M = F.src, F.dst
    P = G.src
    if G.dst is not N:
        raise FunctorError("G must lie over the source of F")
    sections: dict = {}
    objs = []
    for m in M.objects:
        S, _ = fw.fiber(m)
        allowed = lambda u, img: G.mor[img] == u  # noqa: E731
        for T_ob, T_mor in _sections(S, P, allowed):
            o = (m, _key(T_ob), _key(T_mor))
            sections[o] = (T_ob, T_mor)
            objs.append(o)
    by_base: dict = {}
    for o in objs:
        by_base.setdefault(o[0], []).append(o)
    over: dict = {f: [u for u in N.morphisms if F.mor[u] == f] for f in M.morphisms}
    mors, dom, cod, eta_of = [], {}, {}, {}
    for f in M.morphisms:
        m, m2 = M.dom[f], M.cod[f]
        S, _ = fw.fiber(m)
        for o in by_base.get(m, ()):
            T_ob, T_mor = sections[o]
            for o2 in by_base.get(m2, ()):
                T2_ob, T2_mor = sections[o2]
                for eta in _gen_nat_trans(F, fw, G, f, S, T_ob, T_mor, T2_ob, T2_mor, over[f]):
                    g = Key((f, o, o2, eta))
                    mors.append(g)
                    dom[g], cod[g] = o, o2
                    eta_of[g] = eta
    index = {(g[0], g[1], g[2], g[3].values): g for g in mors}
    ident = {}
    for o in objs:
        m = o[0]
        e = M.ident[m]
        T_mor = sections[o][1]
        vals = tuple((u, T_mor[u]) for u in over[e])
        ident[o] = index[(e, o, o, vals)]
    inv = {}
    for g in mors:
        f, o, o2, eta = g
        fi = M.inv[f]
        vals = tuple((u, P.inv[eta(N.inv[u])]) for u in over[fi])
        inv[g] = index[(fi, o2, o, vals)]
    out_of: dict = {}
    for g in mors:
        out_of.setdefault(g[1], []).append(g)
    comp = {}
    for g in mors:
        f, o, o2, eta = g
        for h in out_of[o2]:
            f2, _, o3, omega = h
            ff = M.comp[(f2, f)]
            vals = []
            for w in over[ff]:
                r = fw.lift(N.dom[w], f)
                vals.append((w, P.comp[(omega(N.comp[(w, N.inv[r])]), eta(r))]))
            comp[(h, g)] = index[(ff, o, o3, tuple(vals))]
    Pi = tabulate(objs, mors, dom, cod, comp, ident, inv, name="Π")
    proj = GFunctor(Pi, M, {o: o[0] for o in objs}, {g: g[0] for g in mors})
    return DependentProduct(F, G, fw, Pi, proj, sections)


def _sections(S: GroupoidAssembly, P: GroupoidAssembly, allowed) -> Iterator[tuple[dict, dict]]:
    """Functors ``T: S → P`` with ``G∘T`` the inclusion."""
    from .grpd import iter_functor_maps
    yield from iter_functor_maps(S, P, allowed=allowed)


def _gen_nat_trans(F, fw, G, f, S, T_ob, T_mor, T2_ob, T2_mor, over_f) -> Iterator[GenNatTrans]:
    N, P = F.src, G.src
    base_lifts = {n: fw.lift(n, f) for n in S.objects}
    choices = []
    for n in S.objects:
        r = base_lifts[n]
        cands = [p for p in P.hom(T_ob[n], T2_ob[N.cod[r]]) if G.mor[p] == r]
        choices.append(cands)
    m2 = F.dst.cod[f]
    S2, _ = fw.fiber(m2)
    for pick in _cartesian(*choices):
        at = dict(zip(S.objects, pick))
        vals = {}
        for u in over_f:
            n = N.dom[u]
            r = base_lifts[n]
            vals[u] = P.comp[(T2_mor[N.comp[(u, N.inv[r])]], at[n])]
        ok = True
        for u in over_f:
            for i_ in S.out[N.dom[u]]:
                for j_ in S2.out[N.cod[u]]:
                    v = N.chain([N.inv[i_], u, j_])
                    if P.comp[(T2_mor[j_], vals[u])] != P.comp[(vals[v], T_mor[i_])]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            yield GenNatTrans(f, tuple((u, vals[u]) for u in over_f))


def slice_homs(src: GFunctor, dst: GFunctor) -> list[GFunctor]:
    """Functors ``Z`` with ``dst ∘ Z = src`` (maps in the slice)."""
    allowed = lambda m, img: dst.mor[img] == src.mor[m]  # noqa: E731
    return functors(src.src, dst.src, allowed=allowed)


__all__ = [
    "LiftError", "squares", "pullp", "FibrationWitness", "fiber", "find_normal_isofib", "Report", "SDSData",
    "SDRData", "verify_sds", "verify_sdr", "identity_sds", "path_sds", "CommaFactorization", "comma_factorize",
    "solve_lift", "GPullback", "pullback", "frobenius", "PullbackPower", "pullback_power", "GenNatTrans",
    "DependentProduct", "dependent_product_fib", "slice_homs",
]
