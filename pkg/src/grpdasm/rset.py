"""Symbolic realizer sets, tri-valued membership and the predicate lattice
over finite carriers."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _cartesian
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .pca import (
    DEFAULT_FUEL, App, K, KBAR, Normal, Term, Var, ap, evaluate, iter_terms, lam, mk_pair, show,
    std, unpair,
)

#: default fuel for realizer *search*, where most candidates diverge quickly
SEARCH_FUEL = 1_000

Label = Hashable


class StructuralError(ValueError):
    """An operation was asked to enumerate a set that has no finite listing."""


# --------------------------------------------------------------------- Tri

@dataclass(frozen=True)
class Tri:
    kind: str
    reason: str = ""
    approximate: bool = False
    failures: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("yes", "no", "unknown"):
            raise ValueError(f"bad Tri kind {self.kind!r}")

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"

    @property
    def is_no(self) -> bool:
        return self.kind == "no"

    @property
    def is_unknown(self) -> bool:
        return self.kind == "unknown"

    def __bool__(self) -> bool:
        raise TypeError("Tri is three-valued; test .is_yes / .is_no / .is_unknown")

    def __str__(self) -> str:
        word = self.kind.upper()
        if self.approximate and self.is_yes:
            word += " (approximate)"
        if self.reason:
            word += f": {self.reason}"
        return word

    def with_failures(self, failures: Iterable[str]) -> "Tri":
        return Tri(self.kind, self.reason, self.approximate, tuple(failures))


YES = Tri("yes")
NO = Tri("no")


def yes(approximate: bool = False) -> Tri:
    return Tri("yes", approximate=approximate) if approximate else YES


def no(reason: str = "", failures: Iterable[str] = ()) -> Tri:
    return Tri("no", reason, failures=tuple(failures))


def unknown(reason: str) -> Tri:
    return Tri("unknown", reason)


def conj(tris: Iterable[Tri]) -> Tri:
    """Three-valued AND; stops at the first No."""
    approx = False
    pending: Tri | None = None
    for t in tris:
        if t.is_no:
            return t
        if t.is_unknown and pending is None:
            pending = t
        approx = approx or t.approximate
    if pending is not None:
        return pending
    return yes(approx)


def disj(tris: Iterable[Tri]) -> Tri:
    """Three-valued OR; stops at the first Yes."""
    pending: Tri | None = None
    last_no: Tri = NO
    for t in tris:
        if t.is_yes:
            return t
        if t.is_unknown and pending is None:
            pending = t
        if t.is_no:
            last_no = t
    return pending if pending is not None else last_no


# ------------------------------------------------------------ realizer sets

class RealizerSet:
    """Base class; see the concrete variants below."""

    __slots__ = ()

    @property
    def approximate(self) -> bool:
        return False


@dataclass(frozen=True)
class All(RealizerSet):
    def __repr__(self) -> str:
        return "All()"


@dataclass(frozen=True, eq=False)
class Fin(RealizerSet):
    elements: tuple[Term, ...]
    _set: frozenset = field(init=False, repr=False, compare=False)

    def __init__(self, elements: Iterable[Term] = ()) -> None:
        seen: dict[Term, None] = {}
        for e in elements:
            if not isinstance(e, Term):
                raise TypeError(f"Fin elements must be terms, got {e!r}")
            seen.setdefault(e, None)
        object.__setattr__(self, "elements", tuple(seen))
        object.__setattr__(self, "_set", frozenset(seen))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Fin) and self._set == other._set

    def __hash__(self) -> int:
        return hash(("fin", self._set))

    def __repr__(self) -> str:
        return "Fin{" + ", ".join(show(e) for e in self.elements) + "}"


EMPTY = Fin()


@dataclass(frozen=True)
class PairOf(RealizerSet):
    fst: RealizerSet
    snd: RealizerSet

    @property
    def approximate(self) -> bool:
        return self.fst.approximate or self.snd.approximate


@dataclass(frozen=True)
class Tag(RealizerSet):
    flag: Term
    inner: RealizerSet

    def __post_init__(self) -> None:
        if self.flag is not K and self.flag is not KBAR:
            raise ValueError("Tag flag must be k or kbar")

    @property
    def approximate(self) -> bool:
        return self.inner.approximate


@dataclass(frozen=True)
class Union(RealizerSet):
    l: RealizerSet
    r: RealizerSet

    @property
    def approximate(self) -> bool:
        return self.l.approximate or self.r.approximate


@dataclass(frozen=True)
class Inter(RealizerSet):
    l: RealizerSet
    r: RealizerSet

    @property
    def approximate(self) -> bool:
        return self.l.approximate or self.r.approximate


@dataclass(frozen=True)
class Compl(RealizerSet):
    inner: RealizerSet

    @property
    def approximate(self) -> bool:
        return self.inner.approximate


@dataclass(frozen=True)
class Imp(RealizerSet):
    """``{c | for every case (D, T) and a in D: c·a is defined and in T}``.

    ``approx`` marks sets whose finite domains stand in for a quantifier over
    the whole algebra."""

    cases: tuple[tuple[tuple[Term, ...], RealizerSet], ...]
    approx: bool = False

    def __init__(self, cases: Iterable[tuple[Iterable[Term], RealizerSet]] = (), approx: bool = False) -> None:
        norm = tuple((tuple(dict.fromkeys(d)), tgt) for d, tgt in cases)
        object.__setattr__(self, "cases", norm)
        object.__setattr__(self, "approx", approx)

    @property
    def approximate(self) -> bool:
        return self.approx or any(t.approximate for _, t in self.cases)


@dataclass(frozen=True)
class Decided(RealizerSet):
    """An inductively defined set given by a membership procedure.

    ``decide(t, fuel)`` must return a :class:`Tri`; equality is by ``label``.
    Used for sets such as tagged word realizers that are infinite but have a
    structural membership test.  Never enumerable."""

    label: str
    decide: Callable[[Term, int], Tri] = field(compare=False, hash=False, repr=False)


def union_all(sets: Iterable[RealizerSet]) -> RealizerSet:
    out: RealizerSet | None = None
    for s in sets:
        out = s if out is None else Union(out, s)
    return EMPTY if out is None else out


# --------------------------------------------------------------- membership

def member(R: RealizerSet, t: Term, fuel: int = DEFAULT_FUEL) -> Tri:
    """Decide ``t ∈ R``; ``t`` must be a normal form."""
    if isinstance(R, All):
        return YES
    if isinstance(R, Fin):
        return YES if t in R._set else NO
    if isinstance(R, PairOf):
        p = unpair(t)
        if p is None:
            return NO
        return conj(_lazy(lambda: member(R.fst, p[0], fuel), lambda: member(R.snd, p[1], fuel)))
    if isinstance(R, Tag):
        p = unpair(t)
        if p is None or p[0] is not R.flag:
            return NO
        return member(R.inner, p[1], fuel)
    if isinstance(R, Union):
        return disj(_lazy(lambda: member(R.l, t, fuel), lambda: member(R.r, t, fuel)))
    if isinstance(R, Inter):
        return conj(_lazy(lambda: member(R.l, t, fuel), lambda: member(R.r, t, fuel)))
    if isinstance(R, Compl):
        inner = member(R.inner, t, fuel)
        if inner.is_unknown:
            return inner
        return NO if inner.is_yes else YES
    if isinstance(R, Imp):
        return conj(_imp_checks(R, t, fuel))
    if isinstance(R, Decided):
        return R.decide(t, fuel)
    raise TypeError(f"not a realizer set: {R!r}")


def _lazy(*thunks: Callable[[], Tri]) -> Iterator[Tri]:
    for th in thunks:
        yield th()


def _imp_checks(R: Imp, t: Term, fuel: int) -> Iterator[Tri]:
    for dom, tgt in R.cases:
        for a in dom:
            out = evaluate(App(t, a), fuel)
            if not isinstance(out, Normal):
                yield unknown(f"fuel exhausted applying {show(t)} to {show(a)}")
                continue
            r = member(tgt, out.result, fuel)
            yield r if not r.is_yes or not R.approx else yes(True)


# -------------------------------------------------------------- enumeration

def enumerate_set(R: RealizerSet, fuel: int = DEFAULT_FUEL) -> list[Term] | None:
    """Finite listing of ``R`` in a deterministic order, or ``None``.

    ``Inter`` is listed whenever one side is listable, by filtering it through
    membership in the other side (``None`` if that membership is undecided).
    """
    if isinstance(R, Fin):
        return list(R.elements)
    if isinstance(R, PairOf):
        a, b = enumerate_set(R.fst, fuel), enumerate_set(R.snd, fuel)
        if a is None or b is None:
            return None
        return [mk_pair(x, y) for x, y in _cartesian(a, b)]
    if isinstance(R, Tag):
        inner = enumerate_set(R.inner, fuel)
        return None if inner is None else [mk_pair(R.flag, x) for x in inner]
    if isinstance(R, Union):
        a, b = enumerate_set(R.l, fuel), enumerate_set(R.r, fuel)
        if a is None or b is None:
            return None
        return list(dict.fromkeys(a + b))
    if isinstance(R, Inter):
        for side, other in ((R.l, R.r), (R.r, R.l)):
            items = enumerate_set(side, fuel)
            if items is None:
                continue
            out = []
            for x in items:
                m = member(other, x, fuel)
                if m.is_unknown:
                    return None
                if m.is_yes:
                    out.append(x)
            return out
        return None
    return None


def is_enumerable(R: RealizerSet) -> bool:
    return enumerate_set(R) is not None


def _require_enum(R: RealizerSet, where: str) -> list[Term]:
    items = enumerate_set(R)
    if items is None:
        raise StructuralError(f"realizer set at {where} is not enumerable: {R!r}")
    return items


# ------------------------------------------------------------------ Pred

class Pred:
    """A family of realizer sets indexed by a finite carrier."""

    __slots__ = ("carrier", "_table")

    def __init__(self, carrier: Iterable[Label], at: Mapping[Label, RealizerSet] | Callable[[Label], RealizerSet]):
        self.carrier: tuple[Label, ...] = tuple(dict.fromkeys(carrier))
        get = at.__getitem__ if isinstance(at, Mapping) else at
        table = {}
        for x in self.carrier:
            r = get(x)
            if not isinstance(r, RealizerSet):
                raise TypeError(f"value at {x!r} is not a realizer set")
            table[x] = r
        self._table = table

    def at(self, x: Label) -> RealizerSet:
        return self._table[x]

    def items(self) -> Iterator[tuple[Label, RealizerSet]]:
        for x in self.carrier:
            yield x, self._table[x]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Pred) and self.carrier == other.carrier and self._table == other._table

    def __hash__(self) -> int:
        return hash(self.carrier)

    def __repr__(self) -> str:
        return f"Pred({dict(self.items())!r})"

    def reindex(self, f: Mapping[Label, Label] | Callable[[Label], Label], domain: Iterable[Label]) -> "Pred":
        """``φ∘f`` as a predicate on ``domain``."""
        fn = _fn(f)
        return Pred(domain, lambda x: self.at(fn(x)))


def _fn(f: Mapping | Callable) -> Callable:
    return f.__getitem__ if isinstance(f, Mapping) else f


def _same_carrier(phi: Pred, psi: Pred) -> None:
    if set(phi.carrier) != set(psi.carrier):
        raise ValueError("predicates live on different carriers")


def meet(phi: Pred, psi: Pred) -> Pred:
    _same_carrier(phi, psi)
    return Pred(phi.carrier, lambda x: PairOf(phi.at(x), psi.at(x)))


def join(phi: Pred, psi: Pred) -> Pred:
    _same_carrier(phi, psi)
    return Pred(phi.carrier, lambda x: Union(Tag(K, phi.at(x)), Tag(KBAR, psi.at(x))))


def impl(phi: Pred, psi: Pred) -> Pred:
    _same_carrier(phi, psi)
    return Pred(phi.carrier, lambda x: Imp([(_require_enum(phi.at(x), repr(x)), psi.at(x))]))


def top(carrier: Iterable[Label]) -> Pred:
    return Pred(carrier, lambda x: All())


def bot(carrier: Iterable[Label]) -> Pred:
    return Pred(carrier, lambda x: EMPTY)


def exists_along(f: Mapping | Callable, phi: Pred, codomain: Iterable[Label]) -> Pred:
    """Fibrewise union of ``phi`` along ``f``."""
    fn = _fn(f)
    fibers: dict[Label, list[Label]] = {y: [] for y in codomain}
    for x in phi.carrier:
        fibers[fn(x)].append(x)
    return Pred(fibers, lambda y: union_all(phi.at(x) for x in fibers[y]))


DEFAULT_PROBE: tuple[Term, ...] = (K,)


def forall_along(f: Mapping | Callable, phi: Pred, codomain: Iterable[Label],
                 probe: Sequence[Term] = DEFAULT_PROBE) -> Pred:
    """``a`` is in the result at ``y`` when ``a·b ∈ phi(x)`` for every ``b`` in
    ``probe`` and every ``x`` over ``y``; the probe replaces "every b"."""
    fn = _fn(f)
    fibers: dict[Label, list[Label]] = {y: [] for y in codomain}
    for x in phi.carrier:
        fibers[fn(x)].append(x)
    probe = tuple(probe)
    return Pred(fibers, lambda y: Imp([(probe, phi.at(x)) for x in fibers[y]], approx=True))


# ------------------------------------------------------------- entailment

def _leq_checks(phi: Pred, psi: Pred, r: Term, fuel: int) -> Iterator[tuple[Tri, str]]:
    for x, R in phi.items():
        target = psi.at(x)
        for a in _require_enum(R, repr(x)):
            out = evaluate(App(r, a), fuel)
            where = f"{x!r} on {show(a)}"
            if not isinstance(out, Normal):
                yield unknown(f"fuel exhausted at {where}"), where
                continue
            yield member(target, out.result, fuel), where


def check_leq(phi: Pred, psi: Pred, r: Term, fuel: int = DEFAULT_FUEL) -> Tri:
    """Does ``r`` realize ``phi ≤ psi``?  All points are scanned so that a
    definite counterexample wins over an earlier fuel exhaustion."""
    _same_carrier(phi, psi)
    approx = False
    pending: Tri | None = None
    for res, where in _leq_checks(phi, psi, r, fuel):
        if res.is_no:
            return no(f"counterexample at {where}", (where,))
        if res.is_unknown and pending is None:
            pending = res
        approx = approx or res.approximate
    return pending if pending is not None else yes(approx)


def _quick_leq(phi: Pred, psi: Pred, r: Term, fuel: int) -> bool:
    for res, _ in _leq_checks(phi, psi, r, fuel):
        if not res.is_yes:
            return False
    return True


def search_realizer(phi: Pred, psi: Pred, budget: int, fuel: int = SEARCH_FUEL,
                    extra: Iterable[Term] = ()) -> Term | None:
    """First candidate realizing ``phi ≤ psi``: the ``extra`` terms in order,
    then closed terms of size ≤ ``budget`` in enumeration order."""
    _same_carrier(phi, psi)
    for x, R in phi.items():
        _require_enum(R, repr(x))
    for r in extra:
        if _quick_leq(phi, psi, r, fuel):
            return r
    if budget < 1:
        return None
    for r in iter_terms(budget):
        if _quick_leq(phi, psi, r, fuel):
            return r
    return None


# ------------------------------------------------- standard certificates

def _pv(n: str) -> Term:
    return Var(n)


def cert_pairing(p: Term, q: Term) -> Term:
    """From ``chi ≤ phi`` (p) and ``chi ≤ psi`` (q) to ``chi ≤ phi ∧ psi``."""
    y = _pv("y")
    return lam("y", ap(std("pair"), App(p, y), App(q, y)))


CERT_INL = lam("y", ap(std("pair"), K, _pv("y")))
CERT_INR = lam("y", ap(std("pair"), std("kbar"), _pv("y")))


def cert_copair(p: Term, q: Term) -> Term:
    """From ``phi ≤ chi`` (p) and ``psi ≤ chi`` (q) to ``phi ∨ psi ≤ chi``."""
    y = _pv("y")
    return lam("y", ap(ap(std("ifthen"), App(std("p0"), y), p, q), App(std("p1"), y)))


#: ``(phi ⇒ psi) ∧ phi ≤ psi``
CERT_APP = lam("y", ap(std("app"), App(std("p0"), _pv("y")), App(std("p1"), _pv("y"))))


def cert_curry(p: Term) -> Term:
    """From ``chi ∧ phi ≤ psi`` (p) to ``chi ≤ phi ⇒ psi``."""
    return lam("y z", App(p, ap(std("pair"), _pv("y"), _pv("z"))))


def cert_forall_intro(p: Term) -> Term:
    """From ``alpha∘f ≤ phi`` (p) to ``alpha ≤ ∀_f phi``."""
    return lam("z", App(K, App(p, _pv("z"))))


def cert_forall_elim(p: Term) -> Term:
    """From ``alpha ≤ ∀_f phi`` (p) to ``alpha∘f ≤ phi``."""
    z = _pv("z")
    return lam("z", App(App(p, z), App(p, z)))


__all__ = [
    "cert_pairing", "CERT_INL", "CERT_INR", "cert_copair", "CERT_APP", "cert_curry",
    "cert_forall_intro", "cert_forall_elim",
    "Tri", "YES", "NO", "yes", "no", "unknown", "conj", "disj", "StructuralError",
    "RealizerSet", "All", "Fin", "EMPTY", "PairOf", "Tag", "Union", "Inter", "Compl", "Imp", "Decided",
    "union_all", "member", "enumerate_set", "is_enumerable", "Pred", "meet", "join", "impl",
    "top", "bot", "exists_along", "forall_along", "DEFAULT_PROBE", "check_leq",
    "search_realizer", "SEARCH_FUEL",
]
