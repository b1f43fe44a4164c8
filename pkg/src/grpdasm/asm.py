"""Finite assemblies, realized maps and their constructions."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .pca import (
    DEFAULT_FUEL, App, I, K, KBAR, Normal, P0, P1, S, Term, Var, ap, evaluate, iter_terms, lam,
    mk_pair, nf, show, std,
)
from .rset import (
    YES, All, Compl, Fin, Imp, PairOf, Pred, RealizerSet, StructuralError, Tag, Tri, check_leq,
    enumerate_set, exists_along, member, no, search_realizer, union_all, unknown, yes,
    CERT_INL, CERT_INR, SEARCH_FUEL, cert_pairing,
)

Label = Hashable

#: extra realizers tried when a realizer set cannot be listed
_PROBES: tuple[Term, ...] = (K, S, I, KBAR)


class AssemblyError(ValueError):
    pass


class MorphismError(ValueError):
    def __init__(self, message: str, verdict: Tri | None = None) -> None:
        super().__init__(message)
        self.verdict = verdict


class Assembly:
    """A finite carrier, a realizer set per point and a checked witness per point."""

    __slots__ = ("carrier", "_real", "_witness", "_index")

    def __init__(self, carrier: Iterable[Label], real: Mapping[Label, RealizerSet] | Callable,
                 witness: Mapping[Label, Term] | Callable | None = None, fuel: int = DEFAULT_FUEL,
                 trusted: bool = False):
        self.carrier: tuple[Label, ...] = tuple(dict.fromkeys(carrier))
        get_r = real.__getitem__ if isinstance(real, Mapping) else real
        self._real = {x: get_r(x) for x in self.carrier}
        wit: dict[Label, Term] = {}
        for x in self.carrier:
            if witness is not None:
                w = witness[x] if isinstance(witness, Mapping) else witness(x)
            else:
                items = enumerate_set(self._real[x], fuel)
                if not items:
                    raise AssemblyError(f"no witness available for {x!r}")
                w = items[0]
            r = None if trusted else member(self._real[x], w, fuel)
            if r is not None and not r.is_yes:
                raise AssemblyError(f"witness {show(w)} for {x!r} is not a realizer ({r})")
            wit[x] = w
        self._witness = wit
        self._index = {x: i for i, x in enumerate(self.carrier)}

    def real(self, x: Label) -> RealizerSet:
        return self._real[x]

    def witness(self, x: Label) -> Term:
        return self._witness[x]

    def __contains__(self, x: Label) -> bool:
        return x in self._index

    def __len__(self) -> int:
        return len(self.carrier)

    def pred(self) -> Pred:
        return Pred(self.carrier, self._real)

    def enumerable(self) -> bool:
        return all(enumerate_set(self._real[x]) is not None for x in self.carrier)

    def restrict(self, points: Iterable[Label]) -> "Assembly":
        keep = set(points)
        pts = [x for x in self.carrier if x in keep]
        return Assembly(pts, self._real, self._witness)

    def __repr__(self) -> str:
        return f"Assembly({len(self.carrier)} points)"


class AsmMorphism:
    """A function between carriers together with a realizer.  Validated on
    construction unless ``validate=False`` (a bare candidate)."""

    __slots__ = ("src", "dst", "map", "realizer")

    def __init__(self, src: Assembly, dst: Assembly, map: Mapping[Label, Label] | Callable,
                 realizer: Term, validate: bool = True, fuel: int = DEFAULT_FUEL):
        self.src = src
        self.dst = dst
        get = map.__getitem__ if isinstance(map, Mapping) else map
        self.map: dict[Label, Label] = {x: get(x) for x in src.carrier}
        self.realizer = realizer
        if validate:
            verdict = check_morphism(self, fuel)
            if not verdict.is_yes:
                raise MorphismError(f"realizer {show(realizer)} does not track the map: {verdict}", verdict)

    def __call__(self, x: Label) -> Label:
        return self.map[x]

    def compose(self, first: "AsmMorphism", fuel: int = DEFAULT_FUEL) -> "AsmMorphism":
        """``self ∘ first`` realized by ``λz.(r_self·(r_first·z))``."""
        r = lam("z", App(self.realizer, App(first.realizer, Var("z"))))
        return AsmMorphism(first.src, self.dst, {x: self.map[first.map[x]] for x in first.src.carrier}, r, fuel=fuel)

    def __repr__(self) -> str:
        return f"AsmMorphism({self.map!r}, {show(self.realizer)})"


def realizers_to_check(A: Assembly, x: Label, fuel: int = DEFAULT_FUEL) -> tuple[list[Term], bool]:
    """Listed realizers of ``x``, or the witness plus in-set probes (flagged)."""
    items = enumerate_set(A.real(x), fuel)
    if items is not None:
        return items, False
    probes = [A.witness(x)]
    probes += [p for p in _PROBES if p is not A.witness(x) and member(A.real(x), p, fuel).is_yes]
    return probes, True


def check_morphism(m: AsmMorphism, fuel: int = DEFAULT_FUEL) -> Tri:
    failures: list[str] = []
    approx = False
    pending: Tri | None = None
    for x in m.src.carrier:
        y = m.map.get(x)
        if y not in m.dst:
            return no(f"{x!r} is sent outside the codomain", (f"map({x!r})",))
        items, flagged = realizers_to_check(m.src, x, fuel)
        approx = approx or flagged
        for a in items:
            out = evaluate(App(m.realizer, a), fuel)
            if not isinstance(out, Normal):
                if pending is None:
                    pending = unknown(f"fuel exhausted at {x!r} on {show(a)}")
                continue
            r = member(m.dst.real(y), out.result, fuel)
            if r.is_no:
                failures.append(f"{x!r} on {show(a)}")
                break
            if r.is_unknown and pending is None:
                pending = r
            approx = approx or r.approximate
    if failures:
        return no("realizer misses the target realizer set", failures)
    if pending is not None:
        return pending
    return yes(approx)


def identity(A: Assembly) -> AsmMorphism:
    return AsmMorphism(A, A, {x: x for x in A.carrier}, I)


def same_map(f: AsmMorphism, g: AsmMorphism) -> bool:
    return f.map == g.map


# ------------------------------------------------------------ (co)limits

def terminal() -> Assembly:
    return Assembly([()], {(): All()}, {(): I})


def initial() -> Assembly:
    return Assembly([], {})


@dataclass(frozen=True)
class Product:
    assembly: Assembly
    pr0: AsmMorphism
    pr1: AsmMorphism
    left: Assembly
    right: Assembly

    def mediate(self, f: AsmMorphism, g: AsmMorphism, fuel: int = DEFAULT_FUEL) -> AsmMorphism:
        if f.src is not g.src and f.src.carrier != g.src.carrier:
            raise ValueError("mediator needs a common domain")
        r = cert_pairing(f.realizer, g.realizer)
        return AsmMorphism(f.src, self.assembly, {c: (f.map[c], g.map[c]) for c in f.src.carrier}, r, fuel=fuel)


def product(A: Assembly, B: Assembly) -> Product:
    carrier = [(x, y) for x in A.carrier for y in B.carrier]
    # pairs of checked witnesses are realizers and the projections are
    # tracked by p0/p1 by definition of PairOf, so neither is re-checked
    P = Assembly(carrier, lambda p: PairOf(A.real(p[0]), B.real(p[1])),
                 lambda p: mk_pair(A.witness(p[0]), B.witness(p[1])), trusted=True)
    pr0 = AsmMorphism(P, A, lambda p: p[0], P0, validate=False)
    pr1 = AsmMorphism(P, B, lambda p: p[1], P1, validate=False)
    return Product(P, pr0, pr1, A, B)


@dataclass(frozen=True)
class Coproduct:
    assembly: Assembly
    inl: AsmMorphism
    inr: AsmMorphism

    def copair(self, f: AsmMorphism, g: AsmMorphism, fuel: int = DEFAULT_FUEL) -> AsmMorphism:
        t = Var("t")
        inner = App(std("p1"), t)
        r = lam("t", ap(std("ifthen"), App(std("p0"), t), App(f.realizer, inner), App(g.realizer, inner)))
        mp = {(0, x): f.map[x] for x in f.src.carrier}
        mp.update({(1, y): g.map[y] for y in g.src.carrier})
        return AsmMorphism(self.assembly, f.dst, mp, r, fuel=fuel)


def coproduct(A: Assembly, B: Assembly) -> Coproduct:
    carrier = [(0, x) for x in A.carrier] + [(1, y) for y in B.carrier]

    def real(p):
        return Tag(K, A.real(p[1])) if p[0] == 0 else Tag(KBAR, B.real(p[1]))

    def wit(p):
        return mk_pair(K, A.witness(p[1])) if p[0] == 0 else mk_pair(KBAR, B.witness(p[1]))

    C = Assembly(carrier, real, wit)
    return Coproduct(C, AsmMorphism(A, C, lambda x: (0, x), nf(CERT_INL)),
                     AsmMorphism(B, C, lambda y: (1, y), nf(CERT_INR)))


@dataclass(frozen=True)
class Equalizer:
    assembly: Assembly
    incl: AsmMorphism

    def mediate(self, h: AsmMorphism, fuel: int = DEFAULT_FUEL) -> AsmMorphism:
        bad = [c for c in h.src.carrier if h.map[c] not in self.assembly]
        if bad:
            raise ValueError(f"map does not equalize at {bad[0]!r}")
        return AsmMorphism(h.src, self.assembly, h.map, h.realizer, fuel=fuel)


def equalizer(f: AsmMorphism, g: AsmMorphism) -> Equalizer:
    if f.src.carrier != g.src.carrier or f.dst.carrier != g.dst.carrier:
        raise ValueError("equalizer needs a parallel pair")
    E = f.src.restrict(x for x in f.src.carrier if f.map[x] == g.map[x])
    return Equalizer(E, AsmMorphism(E, f.src, {x: x for x in E.carrier}, I))


@dataclass(frozen=True)
class Coequalizer:
    assembly: Assembly
    quotient: AsmMorphism
    class_of: Mapping[Label, Label]

    def induce(self, h: AsmMorphism, fuel: int = DEFAULT_FUEL) -> AsmMorphism:
        mp = {}
        for cls in self.assembly.carrier:
            images = {h.map[b] for b in cls}
            if len(images) != 1:
                raise ValueError(f"map is not constant on the class {cls!r}")
            mp[cls] = images.pop()
        return AsmMorphism(self.assembly, h.dst, mp, h.realizer, fuel=fuel)


def _classes(points: Sequence[Label], pairs: Iterable[tuple[Label, Label]]) -> dict[Label, tuple]:
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
    groups: dict[Label, list] = {}
    for p in points:
        groups.setdefault(find(p), []).append(p)
    out = {}
    for members in groups.values():
        cls = tuple(members)
        for p in members:
            out[p] = cls
    return out


def quotient(B: Assembly, pairs: Iterable[tuple[Label, Label]]) -> Coequalizer:
    """Quotient of ``B`` by the equivalence generated by ``pairs``; each class is
    realized by the union of its members' realizer sets."""
    cls_of = _classes(B.carrier, pairs)
    classes = list(dict.fromkeys(cls_of[b] for b in B.carrier))
    Q = Assembly(classes, lambda c: union_all(B.real(b) for b in c), lambda c: B.witness(c[0]))
    return Coequalizer(Q, AsmMorphism(B, Q, cls_of, I), cls_of)


def coequalizer(f: AsmMorphism, g: AsmMorphism) -> Coequalizer:
    if f.src.carrier != g.src.carrier or f.dst.carrier != g.dst.carrier:
        raise ValueError("coequalizer needs a parallel pair")
    return quotient(f.dst, ((f.map[a], g.map[a]) for a in f.src.carrier))


# --------------------------------------------------------- regular epis

@dataclass(frozen=True)
class RegEpiVerdict:
    verdict: Tri
    certificates: tuple[Term, Term] | None = None


def is_regular_epi(f: AsmMorphism, budget: int = 7, fuel: int = DEFAULT_FUEL,
                   candidates: Iterable[Term] = ()) -> RegEpiVerdict:
    """Surjective with ``psi`` equivalent to ``∃_f phi``.  The forward half is
    realized by ``f``'s realizer; the backward one is searched (``ι`` first)."""
    image = set(f.map.values())
    missing = [y for y in f.dst.carrier if y not in image]
    if missing:
        return RegEpiVerdict(no(f"not surjective: {missing[0]!r} has no preimage", [repr(missing[0])]))
    phi, psi = f.src.pred(), f.dst.pred()
    ex = exists_along(f.map, phi, f.dst.carrier)
    if f.src.enumerable():
        fwd = check_leq(phi, psi.reindex(f.map, f.src.carrier), f.realizer, fuel)
        if not fwd.is_yes:
            return RegEpiVerdict(fwd)
    if not f.dst.enumerable():
        return RegEpiVerdict(unknown("codomain realizer sets cannot be listed"))
    extra = [I, *candidates]
    back = search_realizer(psi, ex, budget, min(fuel, SEARCH_FUEL), extra=extra)
    if back is None:
        return RegEpiVerdict(unknown(f"no realizer for psi ≤ ∃_f phi up to size {budget}"))
    approx = not f.src.enumerable()
    return RegEpiVerdict(yes(approx), (f.realizer, back))


def is_iso(m: AsmMorphism, budget: int = 7, fuel: int = DEFAULT_FUEL,
           candidates: Iterable[Term] = ()) -> RegEpiVerdict:
    """Bijective on carriers with a realized inverse (``ι``, then ``candidates``,
    then enumeration)."""
    inv = {}
    for x, y in m.map.items():
        if y in inv:
            return RegEpiVerdict(no(f"not injective: {inv[y]!r} and {x!r}"))
        inv[y] = x
    if len(inv) != len(m.dst.carrier):
        return RegEpiVerdict(no("not surjective"))
    if not m.dst.enumerable():
        return RegEpiVerdict(unknown("codomain realizer sets cannot be listed"))
    psi = m.dst.pred()
    target = m.src.pred().reindex(inv, m.dst.carrier)
    r = search_realizer(psi, target, budget, min(fuel, SEARCH_FUEL), extra=[I, *candidates])
    if r is None:
        return RegEpiVerdict(unknown(f"no inverse realizer up to size {budget}"))
    return RegEpiVerdict(YES, (m.realizer, r))


@dataclass(frozen=True)
class ImageFactorization:
    epi: AsmMorphism
    mono: AsmMorphism
    kernel: Assembly


def kernel_pair(f: AsmMorphism) -> tuple[Assembly, AsmMorphism, AsmMorphism]:
    P = product(f.src, f.src)
    Kp = P.assembly.restrict(p for p in P.assembly.carrier if f.map[p[0]] == f.map[p[1]])
    return Kp, AsmMorphism(Kp, f.src, lambda p: p[0], P0), AsmMorphism(Kp, f.src, lambda p: p[1], P1)


def image_factorization(f: AsmMorphism) -> ImageFactorization:
    Kp, k0, k1 = kernel_pair(f)
    q = coequalizer(k0, k1)
    mono = q.induce(f)
    return ImageFactorization(q.quotient, mono, Kp)


# ------------------------------------------------- partitioned / modest

@dataclass(frozen=True)
class Partitioning:
    assembly: Assembly
    pr: AsmMorphism


def partitioning(A: Assembly) -> Partitioning:
    carrier = []
    for x in A.carrier:
        items = enumerate_set(A.real(x))
        if items is None:
            raise StructuralError(f"realizers of {x!r} cannot be listed")
        carrier.extend((x, a) for a in items)
    P = Assembly(carrier, lambda p: Fin([p[1]]), lambda p: p[1])
    return Partitioning(P, AsmMorphism(P, A, lambda p: p[0], I))


def is_partitioned(A: Assembly) -> Tri:
    """Every realizer set of the given presentation is a singleton."""
    for x in A.carrier:
        R = A.real(x)
        items = enumerate_set(R)
        if items is None:
            if isinstance(R, (All, Compl)):
                return no(f"{x!r} has infinitely many realizers", [repr(x)])
            return unknown(f"realizers of {x!r} cannot be listed")
        if len(items) != 1:
            return no(f"{x!r} has {len(items)} realizers", [repr(x)])
    return YES


def is_partitioned_upto_iso(A: Assembly, budget: int = 5, fuel: int = SEARCH_FUEL) -> RegEpiVerdict:
    """Search for ``r`` collapsing each realizer set to one value and ``r'``
    mapping those values back; success exhibits an isomorphic singleton
    presentation."""
    direct = is_partitioned(A)
    if direct.is_yes:
        return RegEpiVerdict(YES, (I, I))
    if not A.enumerable():
        return RegEpiVerdict(unknown("realizer sets cannot be listed"))
    lists = {x: enumerate_set(A.real(x)) for x in A.carrier}
    for r in iter_terms(budget):
        images: dict[Label, Term] = {}
        ok = True
        for x, items in lists.items():
            vals = {normal for a in items
                    for normal in [_nf_or_none(App(r, a), fuel)]}
            if None in vals or len(vals) != 1:
                ok = False
                break
            images[x] = vals.pop()
        if not ok:
            continue
        B = Assembly(A.carrier, lambda x: Fin([images[x]]), images)
        back = search_realizer(B.pred(), A.pred(), budget, fuel, extra=[I])
        if back is not None:
            return RegEpiVerdict(YES, (r, back))
    return RegEpiVerdict(unknown(f"no singleton presentation found up to size {budget}"))


def _nf_or_none(t: Term, fuel: int) -> Term | None:
    out = evaluate(t, fuel)
    return out.result if isinstance(out, Normal) else None


def is_modest(A: Assembly, fuel: int = DEFAULT_FUEL) -> Tri:
    """Distinct points have disjoint realizer sets.  A witness of one point
    lying in another point's set settles overlap even for unlisted sets."""
    pts = A.carrier
    pending: Tri | None = None
    for i, x in enumerate(pts):
        for x2 in pts[i + 1:]:
            for a, b in ((x, x2), (x2, x)):
                m = member(A.real(b), A.witness(a), fuel)
                if m.is_yes:
                    return no(f"{x!r} and {x2!r} share {show(A.witness(a))}", [f"{x!r}/{x2!r}"])
            la, lb = enumerate_set(A.real(x)), enumerate_set(A.real(x2))
            if la is None and lb is None:
                if pending is None:
                    pending = unknown(f"cannot compare {x!r} and {x2!r}")
                continue
            items, other = (la, A.real(x2)) if la is not None else (lb, A.real(x))
            for t in items:
                m = member(other, t, fuel)
                if m.is_yes:
                    return no(f"{x!r} and {x2!r} share {show(t)}", [f"{x!r}/{x2!r}"])
                if m.is_unknown and pending is None:
                    pending = m
    return pending if pending is not None else YES


def nabla(X: Iterable[Label]) -> Assembly:
    X = list(X)
    return Assembly(X, {x: All() for x in X}, {x: I for x in X})


def gamma(A: Assembly) -> tuple[Label, ...]:
    return A.carrier


# -------------------------------------------------- dependent products

@dataclass
class DependentProduct:
    """``Π_f(g)`` over ``Y`` for ``f: X → Y`` and ``g: Z → X``."""

    f: AsmMorphism
    g: AsmMorphism
    assembly: Assembly
    proj: AsmMorphism
    fibers: dict[Label, list[Label]]

    def sections_of(self, y: Label) -> list[Label]:
        return [p for p in self.assembly.carrier if p[0] == y]

    def pullback(self, q: AsmMorphism) -> tuple[Assembly, AsmMorphism]:
        """``f*(W)`` for ``q: W → Y``: points ``(x, w)`` with ``f x = q w``,
        realized by ``[φ(x), ω(w)]``, and its projection to ``X``."""
        X, W = self.f.src, q.src
        pts = [(x, w) for x in X.carrier for w in W.carrier if self.f.map[x] == q.map[w]]
        P = Assembly(pts, lambda p: PairOf(X.real(p[0]), W.real(p[1])),
                     lambda p: mk_pair(X.witness(p[0]), W.witness(p[1])))
        return P, AsmMorphism(P, X, lambda p: p[0], P0)

    def transpose(self, q: AsmMorphism, alpha: AsmMorphism) -> AsmMorphism:
        """``α: f*(W) → Z`` over ``X`` to ``β: W → Π_f(Z)`` over ``Y``."""
        W = q.src
        mp = {}
        for w in W.carrier:
            y = q.map[w]
            sec = tuple((x, alpha.map[(x, w)]) for x in self.fibers[y])
            if (y, sec) not in self.assembly:
                raise LookupError(f"section {sec!r} over {y!r} was not found; pass the transposed realizer as a candidate")
            mp[w] = (y, sec)
        s, t = Var("u"), Var("t")
        r = lam("u", ap(std("pair"), App(q.realizer, s), lam("t", App(alpha.realizer, ap(std("pair"), t, s)))))
        return AsmMorphism(W, self.assembly, mp, r)

    def untranspose(self, q: AsmMorphism, beta: AsmMorphism) -> AsmMorphism:
        """``β: W → Π_f(Z)`` to ``α: f*(W) → Z``."""
        P, _ = self.pullback(q)
        t = Var("t")
        r = lam("t", App(App(std("p1"), App(beta.realizer, App(std("p1"), t))), App(std("p0"), t)))
        mp = {(x, w): dict(beta.map[w][1])[x] for (x, w) in P.carrier}
        return AsmMorphism(P, self.g.src, mp, r)

    def transposed_candidates(self, q: AsmMorphism, alpha: AsmMorphism) -> list[Term]:
        """Second components ``λt.r_α·[t,s]`` for every witness ``s`` of ``W``."""
        out = []
        for w in q.src.carrier:
            out.append(nf(lam("t", App(alpha.realizer, ap(std("pair"), Var("t"), q.src.witness(w))))))
        return out


def dependent_product(f: AsmMorphism, g: AsmMorphism, budget: int = 5, fuel: int = SEARCH_FUEL,
                      candidates: Iterable[Term] = ()) -> DependentProduct:
    """Sections ``F`` of ``g`` over each fibre of ``f`` that admit ``[a, b]``
    with ``a`` realizing ``y`` and ``b·c ∈ ζ(F x)`` for all ``c ∈ φ(x)``."""
    if g.dst.carrier != f.src.carrier:
        raise ValueError("g must land in the domain of f")
    X, Y, Z = f.src, f.dst, g.src
    phi_lists = {}
    for x in X.carrier:
        items = enumerate_set(X.real(x))
        if items is None:
            raise StructuralError(f"realizers of {x!r} cannot be listed")
        phi_lists[x] = items
    fibers: dict[Label, list[Label]] = {y: [] for y in Y.carrier}
    for x in X.carrier:
        fibers[f.map[x]].append(x)
    over: dict[Label, list[Label]] = {x: [] for x in X.carrier}
    for z in Z.carrier:
        over[g.map[z]].append(z)
    candidates = list(candidates)

    real: dict[Label, RealizerSet] = {}
    wit: dict[Label, Term] = {}
    for y in Y.carrier:
        fib = fibers[y]
        for choice in _cartesian(*(over[x] for x in fib)):
            sec = tuple(zip(fib, choice))
            imp = Imp([(phi_lists[x], Z.real(z)) for x, z in sec])
            b = _find_section_realizer(imp, [Z.witness(z) for _, z in sec], candidates, budget, fuel)
            if b is None:
                continue
            real[(y, sec)] = PairOf(Y.real(y), imp)
            wit[(y, sec)] = mk_pair(Y.witness(y), b)
    A = Assembly(list(real), real, wit)
    return DependentProduct(f, g, A, AsmMorphism(A, Y, lambda p: p[0], P0), fibers)


def _find_section_realizer(imp: Imp, witnesses: list[Term], candidates: list[Term], budget: int,
                           fuel: int) -> Term | None:
    tried = []
    if len(set(witnesses)) == 1:
        tried.append(App(K, witnesses[0]))
    elif not witnesses:
        tried.append(I)
    tried.append(I)
    tried.extend(candidates)
    for b in tried:
        b = _nf_or_none(b, fuel)
        if b is not None and member(imp, b, fuel).is_yes:
            return b
    for b in iter_terms(budget):
        b = _nf_or_none(b, fuel)
        if b is not None and member(imp, b, fuel).is_yes:
            return b
    return None


def pi_map(pi_src: DependentProduct, pi_dst: DependentProduct, h: AsmMorphism) -> AsmMorphism:
    """``Π_f(h)`` for ``h: Z → Z'`` over ``X``, realized by
    ``λs.[p0 s, λt.r_h·((p1 s)·t)]``."""
    mp = {}
    for (y, sec) in pi_src.assembly.carrier:
        img = (y, tuple((x, h.map[z]) for x, z in sec))
        if img not in pi_dst.assembly:
            raise LookupError(f"image section {img!r} missing from the target")
        mp[(y, sec)] = img
    s, t = Var("u"), Var("t")
    r = lam("u", ap(std("pair"), App(std("p0"), s), lam("t", App(h.realizer, App(App(std("p1"), s), t)))))
    return AsmMorphism(pi_src.assembly, pi_dst.assembly, mp, r)


__all__ = [
    "Assembly", "AsmMorphism", "AssemblyError", "MorphismError", "check_morphism", "identity",
    "realizers_to_check", "terminal", "initial", "Product", "product", "Coproduct", "coproduct",
    "Equalizer", "equalizer", "Coequalizer", "coequalizer", "quotient", "RegEpiVerdict",
    "is_regular_epi", "is_iso", "ImageFactorization", "kernel_pair", "image_factorization",
    "Partitioning", "partitioning", "is_partitioned", "is_partitioned_upto_iso", "is_modest",
    "nabla", "gamma", "DependentProduct", "dependent_product", "pi_map", "same_map",
]
