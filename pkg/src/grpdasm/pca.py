"""Combinator terms over {S, K}, fueled normal-order evaluation and bracket abstraction.

Terms are hash-consed: structurally equal terms are the same Python object,
so equality is identity and normal forms can be memoised on the nodes
themselves.
"""
from __future__ import annotations

import re
import threading
import weakref
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

DEFAULT_FUEL = 10_000

__all__ = [
    "Term", "Atom", "Var", "App", "S", "K", "I", "KBAR",
    "Normal", "OutOfFuel", "EvalOutcome",
    "parse_term", "show", "ap", "lam", "evaluate", "normal_form", "nf",
    "bracket_abstract", "substitute", "free_vars", "is_closed", "size",
    "mk_pair", "unpair", "std", "STD_NAMES", "church", "church_value",
    "ZERO_TEST", "PRED", "lookup_combinator", "paper_lookup_combinator",
    "enumerate_terms", "iter_terms", "IFTHEN",
    "TermSyntaxError", "DEFAULT_FUEL",
]


class Term:
    """Base class of combinator terms.  Instances are immutable and interned."""

    __slots__ = ()

    def __repr__(self) -> str:
        return f"Term({show(self)!r})"

    def __str__(self) -> str:
        return show(self)

    # structural helpers used everywhere; cheap thanks to interning
    @property
    def closed(self) -> bool:  # pragma: no cover - overridden
        raise NotImplementedError


class Atom(Term):
    __slots__ = ("name", "_h", "__weakref__")

    def __init__(self, name: str) -> None:
        self.name = name
        self._h = hash(("atom", name))

    def __hash__(self) -> int:
        return self._h

    @property
    def closed(self) -> bool:
        return True

    @property
    def size(self) -> int:
        return 1

    def __reduce__(self):
        return (_atom, (self.name,))


S = Atom("s")
K = Atom("k")


def _atom(name: str) -> Atom:
    return S if name == "s" else K


_VARS: "weakref.WeakValueDictionary[str, Var]" = weakref.WeakValueDictionary()
_APPS: "weakref.WeakValueDictionary[tuple[int, int], App]" = weakref.WeakValueDictionary()
_LOCK = threading.Lock()
_IDENT = re.compile(r"[a-z0-9_]+\Z")


class Var(Term):
    __slots__ = ("name", "_h", "__weakref__")

    def __new__(cls, name: str) -> "Var":
        v = _VARS.get(name)
        if v is not None:
            return v
        if not _IDENT.match(name) or name in ("s", "k"):
            raise ValueError(f"invalid variable name {name!r}")
        with _LOCK:
            v = _VARS.get(name)
            if v is None:
                v = object.__new__(cls)
                v.name = name
                v._h = hash(("var", name))
                _VARS[name] = v
        return v

    def __hash__(self) -> int:
        return self._h

    @property
    def closed(self) -> bool:
        return False

    @property
    def size(self) -> int:
        return 1

    def __reduce__(self):
        return (Var, (self.name,))


class App(Term):
    __slots__ = ("fun", "arg", "_h", "size", "_closed", "_nf", "__weakref__")

    def __new__(cls, fun: Term, arg: Term) -> "App":
        key = (id(fun), id(arg))
        node = _APPS.get(key)
        if node is not None:
            return node
        with _LOCK:
            node = _APPS.get(key)
            if node is None:
                node = object.__new__(cls)
                node.fun = fun
                node.arg = arg
                node._h = hash((fun._h, arg._h))
                node.size = fun.size + arg.size
                node._closed = fun.closed and arg.closed
                node._nf = None
                _APPS[key] = node
        return node

    def __hash__(self) -> int:
        return self._h

    @property
    def closed(self) -> bool:
        return self._closed

    def __reduce__(self):
        return (App, (self.fun, self.arg))


def ap(*terms: Term) -> Term:
    """Left-nested application ``((t0 t1) t2) ...``."""
    if not terms:
        raise ValueError("ap needs at least one term")
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def size(t: Term) -> int:
    return t.size


def is_closed(t: Term) -> bool:
    return t.closed


def free_vars(t: Term) -> frozenset[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            if not u._closed:
                stack.append(u.fun)
                stack.append(u.arg)
        elif isinstance(u, Var):
            out.add(u.name)
    return frozenset(out)


# ---------------------------------------------------------------- printing


def show(t: Term) -> str:
    """Fully parenthesised binary form with lowercase ``s``/``k``."""
    parts: list[str] = []
    stack: list[object] = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            parts.append(u)
        elif isinstance(u, App):
            stack.append(")")
            stack.append(u.arg)
            stack.append(" ")
            stack.append(u.fun)
            stack.append("(")
        else:
            parts.append(u.name)  # type: ignore[union-attr]
    return "".join(parts)


# ----------------------------------------------------------------- parsing


class TermSyntaxError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([a-z0-9_]+))")


def parse_term(text: str) -> Term:
    """Parse ``term := atom | "(" term term+ ")"``; sequences associate to the left."""
    pos = 0
    n = len(text)
    # each frame collects the terms seen inside one pair of parentheses
    frames: list[tuple[int, list[Term]]] = [(-1, [])]
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            frames.append((start, []))
        elif m.group(2):
            if len(frames) == 1:
                raise TermSyntaxError("unbalanced ')'", start)
            open_at, items = frames.pop()
            if not items:
                raise TermSyntaxError("empty parentheses", open_at)
            frames[-1][1].append(ap(*items))
        else:
            name = m.group(3)
            frames[-1][1].append(S if name == "s" else K if name == "k" else Var(name))
        pos = m.end()
    if len(frames) > 1:
        raise TermSyntaxError("unbalanced '('", frames[-1][0])
    items = frames[0][1]
    if not items:
        raise TermSyntaxError("empty input", 0)
    return ap(*items)


# -------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class Normal:
    result: Term
    steps: int

    @property
    def is_normal(self) -> bool:
        return True


@dataclass(frozen=True)
class OutOfFuel:
    partial: Term

    @property
    def is_normal(self) -> bool:
        return False


EvalOutcome = Normal | OutOfFuel


def _spine(t: Term, head_args: list[Term]) -> Term:
    # push arguments so that the first argument ends on top of the stack
    while isinstance(t, App):
        head_args.append(t.arg)
        t = t.fun
    return t


def _rebuild(head: Term, args: Iterable[Term]) -> Term:
    for a in args:
        head = App(head, a)
    return head


def evaluate(t: Term, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    """Leftmost-outermost reduction to full normal form, at most ``fuel`` steps."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    if not isinstance(t, App):
        return Normal(t, 0)
    cached = t._nf
    if cached is not None and cached[1] <= fuel:
        return Normal(cached[0], cached[1])

    used = 0
    # frame: [original node, steps at start, head, args (in order), index, normalised args]
    frames: list[list] = []
    cur: Term = t
    while True:
        res: Term | None = None
        if not isinstance(cur, App):
            res = cur
        else:
            c = cur._nf
            if c is not None and c[1] <= fuel - used:
                res = c[0]
                used += c[1]
        if res is None:
            orig = cur
            start = used
            stack: list[Term] = []
            head = _spine(cur, stack)
            while True:
                if head is K and len(stack) >= 2:
                    if used >= fuel:
                        return OutOfFuel(_partial(head, stack, frames))
                    a = stack.pop()
                    stack.pop()
                    used += 1
                    head = _spine(a, stack)
                elif head is S and len(stack) >= 3:
                    if used >= fuel:
                        return OutOfFuel(_partial(head, stack, frames))
                    a = stack.pop()
                    b = stack.pop()
                    c3 = stack.pop()
                    used += 1
                    stack.append(App(b, c3))
                    stack.append(c3)
                    head = _spine(a, stack)
                else:
                    break
            if not stack:
                res = head
                if isinstance(orig, App):
                    orig._nf = (res, used - start)
            else:
                stack.reverse()
                frames.append([orig, start, head, stack, 0, []])
                cur = stack[0]
                continue
        # hand the finished value to the enclosing frames
        while frames:
            fr = frames[-1]
            fr[5].append(res)
            fr[4] += 1
            if fr[4] < len(fr[3]):
                cur = fr[3][fr[4]]
                break
            frames.pop()
            res = _rebuild(fr[2], fr[5])
            if isinstance(fr[0], App):
                fr[0]._nf = (res, used - fr[1])
        else:
            return Normal(res, used)


def _partial(head: Term, stack: list[Term], frames: list[list]) -> Term:
    cur = _rebuild(head, reversed(stack))
    for fr in reversed(frames):
        done = fr[5]
        rest = fr[3][fr[4] + 1:]
        cur = _rebuild(fr[2], [*done, cur, *rest])
    return cur


def normal_form(t: Term, fuel: int = DEFAULT_FUEL) -> Term | None:
    out = evaluate(t, fuel)
    return out.result if isinstance(out, Normal) else None


def nf(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Normal form or ``ValueError`` when fuel runs out."""
    out = evaluate(t, fuel)
    if isinstance(out, Normal):
        return out.result
    raise ValueError(f"no normal form within {fuel} steps: {show(t)[:200]}")


# ------------------------------------------------------ bracket abstraction

I = App(App(S, K), K)


def _occurs(x: Var, t: Term) -> bool:
    stack = [t]
    while stack:
        u = stack.pop()
        if u is x:
            return True
        if isinstance(u, App) and not u._closed:
            stack.append(u.fun)
            stack.append(u.arg)
    return False


def bracket_abstract(x: str | Var, t: Term) -> Term:
    """Compile ``λx.t``: closed terms and other variables go under ``k``,
    ``x`` itself becomes ``ι`` and applications are split with ``s``."""
    v = x if isinstance(x, Var) else Var(x)
    memo: dict[int, Term] = {}

    def go(u: Term) -> Term:
        got = memo.get(id(u))
        if got is not None:
            return got
        if u is v:
            out = I
        elif not isinstance(u, App) or u._closed:
            out = App(K, u)
        else:
            out = App(App(S, go(u.fun)), go(u.arg))
        memo[id(u)] = out
        return out

    # iterative post-order to survive deep terms
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        u, ready = stack.pop()
        if id(u) in memo:
            continue
        if isinstance(u, App) and not u._closed and u is not v and not ready:
            stack.append((u, True))
            stack.append((u.arg, False))
            stack.append((u.fun, False))
            continue
        go(u)
    return memo[id(t)]


def lam(names: str | Sequence[str], body: Term) -> Term:
    """``λx1,...,xn.body`` as nested bracket abstractions (innermost first)."""
    if isinstance(names, str):
        names = names.split()
    for n in reversed(list(names)):
        body = bracket_abstract(n, body)
    return body


def substitute(t: Term, x: str | Var, a: Term) -> Term:
    v = x if isinstance(x, Var) else Var(x)
    memo: dict[int, Term] = {}
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        u, ready = stack.pop()
        if id(u) in memo:
            continue
        if u is v:
            memo[id(u)] = a
        elif not isinstance(u, App) or u._closed:
            memo[id(u)] = u
        elif ready:
            memo[id(u)] = App(memo[id(u.fun)], memo[id(u.arg)])
        else:
            stack.append((u, True))
            stack.append((u.arg, False))
            stack.append((u.fun, False))
    return memo[id(t)]


# ------------------------------------------------------ derived combinators

def _v(name: str) -> Var:
    return Var(name)


_x, _y, _z, _t, _f, _u, _w = (_v(n) for n in ("x", "y", "z", "t", "f", "u", "w"))

KBAR_TERM = lam("x y", _y)
PAIR_TERM = lam("x y z", ap(_z, _x, _y))
P0_TERM = lam("x", ap(_x, K))
P1_TERM = lam("x", ap(_x, KBAR_TERM))
IFTHEN_TERM = lam("t x y", ap(_t, bracket_abstract("z", _x), bracket_abstract("z", _y), K))
APP_TERM = lam("f x", ap(_f, _x))
KAPPA0 = lam("w u v", ap(_u, ap(_w, _w, _u), _v("v")))
KAPPA1 = lam("u v", ap(_v("v"), ap(_u, _u, _v("v"))))
FIXF_TERM = App(KAPPA0, KAPPA0)
FIX_TERM = App(KAPPA1, KAPPA1)

_STD = {
    "i": I,
    "kbar": KBAR_TERM,
    "pair": PAIR_TERM,
    "p0": P0_TERM,
    "p1": P1_TERM,
    "ifthen": IFTHEN_TERM,
    "app": APP_TERM,
    "fix": FIX_TERM,
    "fixf": FIXF_TERM,
    "kappa0": KAPPA0,
    "kappa1": KAPPA1,
}
STD_NAMES = tuple(_STD)


def std(name: str) -> Term:
    """Closed term for a named derived combinator."""
    try:
        return _STD[name]
    except KeyError:
        raise KeyError(f"unknown combinator {name!r}; known: {', '.join(STD_NAMES)}") from None


KBAR = nf(KBAR_TERM)
P0 = nf(P0_TERM)
P1 = nf(P1_TERM)


def mk_pair(a: Term, b: Term) -> Term:
    """The canonical normal form of ``pair·a·b`` for normal ``a``, ``b``."""
    return App(App(S, App(App(S, I), App(K, a))), App(K, b))


def unpair(t: Term) -> tuple[Term, Term] | None:
    """Inverse of :func:`mk_pair` on the canonical shape."""
    if not (isinstance(t, App) and isinstance(t.fun, App) and t.fun.fun is S):
        return None
    left, right = t.fun.arg, t.arg
    if not (isinstance(right, App) and right.fun is K):
        return None
    if not (isinstance(left, App) and isinstance(left.fun, App) and left.fun.fun is S
            and left.fun.arg is I and isinstance(left.arg, App) and left.arg.fun is K):
        return None
    return left.arg.arg, right.arg


# ---------------------------------------------------------- Church numerals

ZERO_TEST = P0
PRED = nf(lam("w", ap(IFTHEN_TERM, ap(P0_TERM, _w), I, ap(P1_TERM, _w))))

_CHURCH: list[Term] = [I]


def church(n: int) -> Term:
    """Numeral with ``0 = ι`` and ``n+1 = [k̄, n]``, in normal form."""
    if n < 0:
        raise ValueError("church numerals are natural numbers")
    while len(_CHURCH) <= n:
        _CHURCH.append(mk_pair(KBAR, _CHURCH[-1]))
    return _CHURCH[n]


def church_value(t: Term) -> int | None:
    """Decode a numeral in normal form, or ``None``."""
    n = 0
    while t is not I:
        p = unpair(t)
        if p is None or p[0] is not KBAR:
            return None
        t = p[1]
        n += 1
    return n


# literal recursion: ifthenN = λf,l,n. ifthen (Z·n) (p0·l) ((f·(p1·l))·(P·n))
_IFTHEN_N = lam(
    "f l n",
    ap(IFTHEN_TERM, ap(P0_TERM, _v("n")), ap(P0_TERM, _v("l")),
       ap(ap(_f, ap(P1_TERM, _v("l"))), ap(PRED, _v("n")))),
)
_PAPER_ENGINE = App(FIXF_TERM, _IFTHEN_N)

IFTHEN = nf(IFTHEN_TERM)


def _lookup_level(r: Term, rest: Term) -> Term:
    # λn. ifthen (Z·n) r (n·(k·rest)); for n = [k̄, m] the else branch
    # reduces to rest·m, handing the stored predecessor over without
    # recomputing it.  Every piece is normal, so the level is normal too.
    n = _v("n")
    body = ap(IFTHEN, App(P0, n), r, App(n, App(K, rest)))
    return bracket_abstract("n", body)


def _church_list(table: Sequence[Term]) -> Term:
    lst: Term = I
    for r in reversed(list(table)):
        lst = mk_pair(r, lst)
    return lst


def lookup_combinator(table: Sequence[Term]) -> Term:
    """Normal ``L`` with ``L·church(i)`` reducing to ``table[i]``.

    This is the ``ifthenN`` recursion unrolled once per table entry: level
    ``i`` tests the numeral with ``Z`` and either answers ``table[i]`` or
    hands the predecessor to level ``i+1``.  Unlike the fixed-point
    form it has a normal form, so it can be used as a realizer.  Cost is
    linear in the index.
    """
    out: Term = I
    for r in reversed(list(table)):
        out = _lookup_level(r, out)
    return out


def paper_lookup_combinator(table: Sequence[Term]) -> Term:
    """The literal ``(fixf·ifthenN)·π`` term.  Applied to a numeral it gives
    the right entry, but it has no normal form of its own and its cost is
    exponential in the index, so it is kept only for cross-checking."""
    return App(_PAPER_ENGINE, _church_list(table))


# -------------------------------------------------------- term enumeration

_BY_SIZE: list[list[Term]] = [[], [S, K]]
_ENUM_LOCK = threading.Lock()


def _terms_of_size(n: int) -> list[Term]:
    with _ENUM_LOCK:
        while len(_BY_SIZE) <= n:
            m = len(_BY_SIZE)
            row: list[Term] = []
            for ls in range(1, m):
                for left in _BY_SIZE[ls]:
                    for right in _BY_SIZE[m - ls]:
                        row.append(App(left, right))
            _BY_SIZE.append(row)
        return _BY_SIZE[n]


def iter_terms(max_size: int) -> Iterator[Term]:
    for n in range(1, max_size + 1):
        yield from _terms_of_size(n)


def enumerate_terms(max_size: int) -> list[Term]:
    """All closed S/K terms with at most ``max_size`` atoms: size-major, then by
    (left size, left, right) order.  Prefix-stable in ``max_size``."""
    if max_size < 1:
        return []
    return list(iter_terms(max_size))
