"""Set-level W-types at desk scale.

Trees are structural: a root label ``y`` and one child per element of the
fiber ``f⁻¹(y)``.  Since ``W_f`` is usually infinite, enumeration is bounded
by depth (a leaf has depth 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _cartesian
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .asm import Assembly
from .grpd import table_map, term_decoder
from .pca import DEFAULT_FUEL, App, I, K, Term, enumerate_terms, mk_pair
from .rset import Imp, PairOf, RealizerSet, Tri, enumerate_set, member, no, unknown, yes

Label = Hashable


@dataclass(frozen=True)
class WTree:
    root: Label
    children: tuple = ()  # (x, WTree) pairs in fiber order

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.root, self.children)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for _, c in self.children), default=0)

    @property
    def size(self) -> int:
        return 1 + sum(c.size for _, c in self.children)

    def child(self, x: Label) -> "WTree":
        for k, c in self.children:
            if k == x:
                return c
        raise KeyError(x)

    def __repr__(self) -> str:
        if not self.children:
            return f"{self.root}"
        inner = ", ".join(f"{x}: {c!r}" for x, c in self.children)
        return f"{self.root}{{{inner}}}"


@dataclass
class PolySpec:
    """``f: X → Y``, optionally with ``g: X → Z`` and ``h: Y → Z``."""
    X: Sequence[Label]
    Y: Sequence[Label]
    f: Mapping[Label, Label]
    g: Mapping[Label, Label] | None = None
    h: Mapping[Label, Label] | None = None
    Z: Sequence[Label] | None = None
    _fibers: dict = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.X, self.Y = tuple(self.X), tuple(self.Y)
        ys = set(self.Y)
        for x in self.X:
            if x not in self.f or self.f[x] not in ys:
                raise ValueError(f"f is not a total map into Y at {x!r}")
        if (self.g is None) != (self.h is None):
            raise ValueError("g and h come together")
        if self.g is not None:
            zs = set(self.Z) if self.Z is not None else set(self.g.values()) | set(self.h.values())
            self.Z = tuple(self.Z) if self.Z is not None else tuple(sorted(zs, key=repr))
            if any(x not in self.g or self.g[x] not in zs for x in self.X):
                raise ValueError("g is not a total map into Z")
            if any(y not in self.h or self.h[y] not in zs for y in self.Y):
                raise ValueError("h is not a total map into Z")
        self._fibers = {y: tuple(x for x in self.X if self.f[x] == y) for y in self.Y}

    def fiber(self, y: Label) -> tuple:
        return self._fibers[y]

    @property
    def dependent(self) -> bool:
        return self.g is not None


# ---------------------------------------------------------- algebra iso

def alpha(spec: PolySpec, y: Label, children: Mapping[Label, WTree] | Sequence[WTree]) -> WTree:
    """The structure map ``Σ_y W^{f⁻¹(y)} → W``."""
    fib = spec.fiber(y)
    if isinstance(children, Mapping):
        if set(children) != set(fib):
            raise ValueError(f"children must be indexed by the fiber {fib!r} of {y!r}")
        kids = tuple((x, children[x]) for x in fib)
    else:
        children = tuple(children)
        if len(children) != len(fib):
            raise ValueError(f"{y!r} needs {len(fib)} children")
        kids = tuple(zip(fib, children))
    return WTree(y, kids)


def dest(t: WTree) -> tuple[Label, dict]:
    return t.root, dict(t.children)


# ---------------------------------------------------------- enumeration

def enumerate_trees(spec: PolySpec, depth: int, limit: int | None = None) -> list[WTree]:
    """All trees of depth ``≤ depth``, shallower first, in a deterministic
    order that extends the order at smaller depths.  ``limit`` guards
    against blow-up."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    out: list[WTree] = []
    previous: list[WTree] = []   # trees of depth ≤ d - 1
    newest: set[WTree] = set()   # trees of depth exactly d - 1
    for d in range(1, depth + 1):
        layer = []
        for y in spec.Y:
            fib = spec.fiber(y)
            if d == 1:
                if not fib:
                    layer.append(WTree(y))
                continue
            if not fib:
                continue
            for combo in _cartesian(previous, repeat=len(fib)):
                if not any(c in newest for c in combo):
                    continue
                layer.append(WTree(y, tuple(zip(fib, combo))))
                if limit is not None and len(out) + len(layer) > limit:
                    raise ValueError(f"more than {limit} trees up to depth {depth}")
        out.extend(layer)
        previous = list(out)
        newest = set(layer)
        if not layer:
            break  # no new trees at this depth means none at larger depths either
    return out


def count_trees(spec: PolySpec, depth: int) -> int:
    """Number of trees of depth ``≤ depth`` by the recurrence
    ``N_d = Σ_y N_{d-1}^{|f⁻¹(y)|}`` (no trees are listed)."""
    n = 0
    for _ in range(depth):
        n = sum(n ** len(spec.fiber(y)) for y in spec.Y)
    return n


# ------------------------------------------------------------- recursion

def fold(spec: PolySpec, algebra: Callable[[Label, dict], object], t: WTree,
         memo: dict | None = None) -> object:
    """The unique algebra morphism out of the trees, applied to ``t``."""
    memo = {} if memo is None else memo
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if node in memo:
            continue
        if ready:
            memo[node] = algebra(node.root, {x: memo[c] for x, c in node.children})
        else:
            stack.append((node, True))
            stack.extend((c, False) for _, c in node.children if c not in memo)
    return memo[t]


def algebra_violations(spec: PolySpec, algebra: Callable[[Label, dict], object], table: Mapping[WTree, object],
                       trees: Iterable[WTree]) -> list[WTree]:
    """Trees where ``table`` breaks the algebra square
    ``table(α(y, t)) = algebra(y, table ∘ t)``.  Only trees whose children
    are all in ``table`` are checked."""
    bad = []
    for t in trees:
        if t not in table or any(c not in table for _, c in t.children):
            continue
        if table[t] != algebra(t.root, {x: table[c] for x, c in t.children}):
            bad.append(t)
    return bad


# ------------------------------------------------------ dependent trees

def is_fgh_tree(spec: PolySpec, t: WTree) -> bool:
    if not spec.dependent:
        raise ValueError("PolySpec has no g, h: not a dependent polynomial")
    stack = [t]
    while stack:
        node = stack.pop()
        for x, c in node.children:
            if spec.g[x] != spec.h[c.root]:
                return False
            stack.append(c)
    return True


def filter_fgh(spec: PolySpec, trees: Iterable[WTree]) -> list[tuple[WTree, Label]]:
    """The (f,g,h)-trees among ``trees`` with their images ``h(root)``."""
    return [(t, spec.h[t.root]) for t in trees if is_fgh_tree(spec, t)]


# ------------------------------------------------------ sequence encoding

def to_sequences(t: WTree) -> frozenset[tuple]:
    """The prefix-closed set of paths ``(y, x, y', x', …)``."""
    out = {(t.root,)}
    for x, c in t.children:
        out.add((t.root, x))
        out.update((t.root, x) + s for s in to_sequences(c))
    return frozenset(out)


def is_f_tree(spec: PolySpec, seqs: Iterable[tuple]) -> bool:
    """The f-tree conditions on a finite set of sequences: prefix-closed,
    one sequence of length 1, alternating Y/X labels, a unique node after
    every edge, and the edges out of a node are exactly its fiber."""
    seqs = set(seqs)
    ys, xs = set(spec.Y), set(spec.X)
    if sum(1 for s in seqs if len(s) == 1) != 1:
        return False
    for s in seqs:
        if not s or any((z not in ys) if i % 2 == 0 else (z not in xs) for i, z in enumerate(s)):
            return False
        if len(s) > 1 and s[:-1] not in seqs:
            return False
        nxt = {u[-1] for u in seqs if len(u) == len(s) + 1 and u[:-1] == s}
        if len(s) % 2 == 0 and len(nxt) != 1:
            return False
        if len(s) % 2 == 1 and nxt != set(spec.fiber(s[-1])):
            return False
    return True


def from_sequences(spec: PolySpec, seqs: Iterable[tuple]) -> WTree:
    seqs = set(seqs)
    if not is_f_tree(spec, seqs):
        raise ValueError("not a finite f-tree")

    def build(prefix: tuple) -> WTree:
        y = prefix[-1]
        kids = []
        for x in spec.fiber(y):
            nxt = next(u for u in seqs if len(u) == len(prefix) + 2 and u[:len(prefix) + 1] == prefix + (x,))
            kids.append((x, build(nxt)))
        return WTree(y, tuple(kids))

    root = next(s for s in seqs if len(s) == 1)
    return build(root)


# ------------------------------------------------------------ decoration

def decorate(spec: PolySpec, t: WTree, Yasm: Assembly, Xasm: Assembly) -> RealizerSet:
    """``ω(t) = {[r, s] | r ∈ ψ(root), s·u ∈ ω(t_x) for all x and u ∈ φ(x)}``.
    Non-enumerable ``φ(x)`` are represented by their witness and the set is
    marked approximate."""
    memo: dict[WTree, RealizerSet] = {}

    def go(node: WTree) -> RealizerSet:
        if node in memo:
            return memo[node]
        cases, approx = [], False
        for x, c in node.children:
            items = enumerate_set(Xasm.real(x))
            if items is None:
                items, approx = [Xasm.witness(x)], True
            cases.append((items, go(c)))
        memo[node] = PairOf(Yasm.real(node.root), Imp(cases, approx))
        return memo[node]

    return go(t)


def _dispatch(clauses: list[tuple[list[Term], Term]]) -> Term | None:
    """A lookup term sending each index realizer to its clause's value,
    when the index realizers can be decoded."""
    assign: dict[Term, int] = {}
    values: list[Term] = []
    for us, w in clauses:
        if w not in values:
            values.append(w)
        for u in us:
            if assign.setdefault(u, values.index(w)) != values.index(w):
                return None
    dec = term_decoder(assign)
    return None if dec is None else table_map(dec, values)


def decoration_witness(spec: PolySpec, t: WTree, Yasm: Assembly, Xasm: Assembly,
                       budget: int = 5, fuel: int = DEFAULT_FUEL) -> tuple[Tri, Term | None]:
    """Decide inhabitation of ``ω(t)`` as far as a bounded search allows.

    Yes comes with a member; No means a child with a realizable index is
    provably uninhabited; Unknown means no uniform ``s`` was found among
    constants, a lookup on the index realizers and terms of size
    ``≤ budget``."""
    memo: dict[WTree, tuple[Tri, Term | None]] = {}

    def go(node: WTree) -> tuple[Tri, Term | None]:
        if node in memo:
            return memo[node]
        r = Yasm.witness(node.root)  # assemblies always carry one
        kids = []
        for x, c in node.children:
            us = enumerate_set(Xasm.real(x))
            if us is None:
                us = [Xasm.witness(x)]
            if not us:
                continue  # vacuous clause
            verdict, w = go(c)
            if verdict.is_no:
                memo[node] = (no(f"subtree at {x!r} is uninhabited", verdict.failures), None)
                return memo[node]
            kids.append((us, c, w, verdict))
        if not kids:
            memo[node] = (yes(), mk_pair(r, I))
            return memo[node]
        if any(v.is_unknown for _, _, _, v in kids):
            memo[node] = (unknown(f"a subtree of {node.root!r} is undecided"), None)
            return memo[node]
        target = Imp([(us, decorate(spec, c, Yasm, Xasm)) for us, c, _, _ in kids])
        cands = [App(K, w) for _, _, w, _ in kids]
        table = _dispatch([(us, w) for us, _, w, _ in kids])
        if table is not None:
            cands.append(table)
        cands += enumerate_terms(budget)
        for s in cands:
            if member(target, s, fuel).is_yes:
                memo[node] = (yes(), mk_pair(r, s))
                return memo[node]
        memo[node] = (unknown(f"no uniform s for {node.root!r} within budget {budget}"), None)
        return memo[node]

    return go(t)


__all__ = [
    "WTree", "PolySpec", "alpha", "dest", "enumerate_trees", "count_trees", "fold", "algebra_violations",
    "is_fgh_tree", "filter_fgh", "to_sequences", "is_f_tree", "from_sequences", "decorate",
    "decoration_witness",
]
