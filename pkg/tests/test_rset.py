from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from grpdasm.pca import I, K, KBAR, P0, P1, S, App, ap, church, enumerate_terms, evaluate, mk_pair, nf, std
from grpdasm.rset import (
    CERT_APP, CERT_INL, CERT_INR, EMPTY, All, Compl, Fin, Imp, Inter, PairOf, Pred, StructuralError, Tag,
    Union, bot, cert_copair, cert_curry, cert_forall_elim, cert_forall_intro, cert_pairing, check_leq,
    enumerate_set, exists_along, forall_along, impl, join, meet, member, search_realizer, top,
)

POOL = [K, S, I, KBAR, church(1), App(K, K), App(S, K), mk_pair(K, S)]


def rand_set(rng: random.Random, depth: int = 0):
    roll = rng.random()
    if depth >= 2 or roll < 0.6:
        return Fin(rng.sample(POOL, rng.randint(0, 3)))
    if roll < 0.75:
        return PairOf(rand_set(rng, depth + 1), rand_set(rng, depth + 1))
    if roll < 0.9:
        return Tag(rng.choice([K, KBAR]), rand_set(rng, depth + 1))
    return Union(rand_set(rng, depth + 1), rand_set(rng, depth + 1))


def rand_pred(rng: random.Random, carrier):
    return Pred(carrier, {x: rand_set(rng) for x in carrier})


seeds = st.integers(0, 10**6)


# ---------------------------------------------------------------- membership

def test_member_examples():
    assert member(Fin([K]), K).is_yes
    assert member(PairOf(Fin([K]), Fin([S])), nf(ap(std("pair"), K, S))).is_yes
    assert member(Imp([([K], Fin([K]))]), I).is_yes
    assert member(All(), S).is_yes
    assert member(Fin([K]), S).is_no
    assert member(EMPTY, K).is_no


def test_tag_membership_checks_flag():
    t = Tag(K, Fin([S]))
    assert member(t, mk_pair(K, S)).is_yes
    assert member(t, mk_pair(KBAR, S)).is_no
    assert member(t, S).is_no


def test_boolean_combinators():
    a = Fin([K, S])
    assert member(Inter(a, Fin([S])), S).is_yes
    assert member(Inter(a, Fin([S])), K).is_no
    assert member(Compl(a), I).is_yes
    assert member(Compl(a), K).is_no
    assert member(Union(Fin([K]), Fin([S])), S).is_yes


def test_imp_unknown_on_divergence():
    sii = ap(S, I, I)
    r = member(Imp([([sii], All())]), sii, fuel=200)
    assert r.is_unknown
    with pytest.raises(TypeError):
        bool(r)


def test_member_monotone_in_fuel():
    R = Imp([([K, S], Fin([K, S]))])
    for t in enumerate_terms(4):
        t = evaluate(t).result
        prev = None
        for fuel in (1, 2, 5, 50, 1000):
            cur = member(R, t, fuel)
            if prev is not None and not prev.is_unknown:
                assert cur.kind == prev.kind
            prev = cur


def test_enumerate_examples():
    assert enumerate_set(Fin([K, S])) == [K, S]
    assert enumerate_set(PairOf(Fin([K]), Fin([S]))) == [mk_pair(K, S)]
    assert enumerate_set(All()) is None
    assert enumerate_set(Compl(Fin([K]))) is None
    assert enumerate_set(Imp([])) is None
    assert enumerate_set(Inter(Compl(Fin([K])), Fin([K, S]))) == [S]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_enumeration_agrees_with_membership(seed):
    rng = random.Random(seed)
    R = rand_set(rng)
    items = enumerate_set(R)
    assert items is not None and len(items) == len(set(items))
    for t in items:
        assert member(R, t).is_yes


# ------------------------------------------------------------------ lattice

def test_lattice_shapes():
    phi = Pred(["a"], {"a": Fin([K])})
    psi = Pred(["a"], {"a": Fin([S])})
    assert meet(phi, psi).at("a") == PairOf(Fin([K]), Fin([S]))
    assert join(phi, psi).at("a") == Union(Tag(K, Fin([K])), Tag(KBAR, Fin([S])))
    assert member(bot(["a"]).at("a"), K).is_no
    assert member(top(["a"]).at("a"), K).is_yes


def test_impl_rejects_non_enumerable():
    with pytest.raises(StructuralError):
        impl(top(["a"]), top(["a"]))


def test_carriers_must_match():
    with pytest.raises(ValueError):
        meet(top(["a"]), top(["b"]))


def test_exists_along_unions_fibers():
    phi = Pred(["a", "b"], {"a": Fin([K]), "b": Fin([S])})
    ex = exists_along(lambda x: "y", phi, ["y", "z"])
    assert set(enumerate_set(ex.at("y"))) == {K, S}
    assert member(ex.at("z"), K).is_no


def test_forall_with_probe():
    phi = Pred(["a"], {"a": Fin([S])})
    fa = forall_along(lambda x: "y", phi, ["y", "z"])
    r = member(fa.at("y"), App(K, S))
    assert r.is_yes and r.approximate
    assert member(fa.at("y"), App(K, K)).is_no
    assert member(fa.at("z"), K).is_yes  # empty fibre: no obligations


def test_check_leq_examples():
    rng = random.Random(3)
    phi, psi = rand_pred(rng, "ab"), rand_pred(rng, "ab")
    assert check_leq(meet(phi, psi), phi, P0).is_yes
    assert check_leq(phi, top("ab"), I).is_yes
    assert check_leq(phi, join(phi, psi), CERT_INL).is_yes


def test_check_leq_reports_counterexample():
    phi = Pred(["a"], {"a": Fin([K])})
    r = check_leq(phi, Pred(["a"], {"a": Fin([S])}), I)
    assert r.is_no and r.failures


def test_search_realizer_examples():
    phi = Pred(["a"], {"a": Fin([K, S])})
    r = search_realizer(phi, phi, 3)
    assert r is not None and check_leq(phi, phi, r).is_yes
    assert search_realizer(Pred(["a"], {"a": Fin([K])}), bot(["a"]), 5) is None
    assert search_realizer(phi, phi, 0) is None


# ---------------------------------------------------------- certificates

def _app_witness(phi: Pred, psi: Pred) -> Pred:
    """An enumerable predicate below ``phi ⇒ psi`` built from a candidate pool."""
    imp = impl(phi, psi)
    cands = [App(K, b) for R in (psi.at(x) for x in psi.carrier) for b in enumerate_set(R)]
    cands += [I, P0, P1]
    return Pred(phi.carrier, {x: Fin([c for c in cands if member(imp.at(x), c).is_yes]) for x in phi.carrier})


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_tripos_certificates(seed):
    rng = random.Random(seed)
    X = ["a", "b", "c"][: rng.randint(1, 3)]
    phi, psi, chi = rand_pred(rng, X), rand_pred(rng, X), rand_pred(rng, X)
    assert check_leq(meet(phi, psi), phi, P0).is_yes
    assert check_leq(meet(phi, psi), psi, P1).is_yes
    # chi ≤ chi by ι and chi ≤ chi ∨ psi by inl, paired
    assert check_leq(chi, meet(chi, join(chi, psi)), cert_pairing(I, CERT_INL)).is_yes
    assert check_leq(phi, join(phi, psi), CERT_INL).is_yes
    assert check_leq(psi, join(phi, psi), CERT_INR).is_yes
    assert check_leq(join(phi, psi), join(psi, phi), cert_copair(CERT_INR, CERT_INL)).is_yes
    w = _app_witness(phi, psi)
    assert check_leq(meet(w, phi), psi, CERT_APP).is_yes
    assert check_leq(meet(chi, phi), phi, P1).is_yes
    curried = cert_curry(P1)
    for x in X:
        for c in enumerate_set(chi.at(x)):
            assert member(impl(phi, phi).at(x), nf(App(curried, c))).is_yes
    assert check_leq(phi, top(X), I).is_yes
    assert check_leq(bot(X), chi, I).is_yes


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_quantifier_transposes(seed):
    rng = random.Random(seed)
    X, Y = ["a", "b", "c"], ["u", "v"]
    f = {x: rng.choice(Y) for x in X}
    psi, alpha = rand_pred(rng, Y), rand_pred(rng, X)
    phi = meet(psi.reindex(f, X), alpha)  # phi ≤ psi∘f by p0
    assert check_leq(phi, psi.reindex(f, X), P0).is_yes
    assert check_leq(exists_along(f, phi, Y), psi, P0).is_yes
    beta = rand_pred(rng, X)
    target = join(psi.reindex(f, X), beta)  # psi∘f ≤ target by inl
    intro = cert_forall_intro(CERT_INL)
    assert check_leq(psi, forall_along(f, target, Y), intro).is_yes
    assert check_leq(psi.reindex(f, X), target, cert_forall_elim(intro)).is_yes


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_beck_chevalley_with_identity(seed):
    rng = random.Random(seed)
    Y, Z, W = ["y0", "y1", "y2"], ["z0", "z1"], ["w0", "w1"]
    h = {y: rng.choice(W) for y in Y}
    k = {z: rng.choice(W) for z in Z}
    P = [(y, z) for y in Y for z in Z if h[y] == k[z]]
    phi = rand_pred(rng, Z)
    lhs = exists_along(lambda p: p[0], phi.reindex(lambda p: p[1], P), Y)
    rhs = exists_along(k, phi, W).reindex(h, Y)
    assert check_leq(lhs, rhs, I).is_yes
    assert check_leq(rhs, lhs, I).is_yes


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_frobenius_by_search(seed):
    rng = random.Random(seed)
    X, Y = ["a", "b", "c"], ["u", "v"]
    f = {x: rng.choice(Y) for x in X}
    phi, psi = rand_pred(rng, X), rand_pred(rng, Y)
    lhs = exists_along(f, meet(phi, psi.reindex(f, X)), Y)
    rhs = meet(exists_along(f, phi, Y), psi)
    a, b = search_realizer(lhs, rhs, 3), search_realizer(rhs, lhs, 3)
    assert a is not None and b is not None
