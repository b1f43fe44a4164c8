from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from grpdasm.asm import (
    Assembly, AssemblyError, AsmMorphism, MorphismError, check_morphism, coequalizer, coproduct,
    dependent_product, equalizer, gamma, identity, image_factorization, is_iso, is_modest,
    is_partitioned, is_partitioned_upto_iso, is_regular_epi, nabla, partitioning, pi_map, product,
    terminal,
)
from grpdasm.pca import I, K, KBAR, P0, S, App, church, lam, mk_pair, nf
from grpdasm.rset import Fin, StructuralError, cert_pairing

POOL = [K, S, I, KBAR, church(1), church(2), App(K, K), App(S, K)]
seeds = st.integers(0, 10**6)


def rand_asm(rng: random.Random, n: int | None = None, prefix: str = "x") -> Assembly:
    n = rng.randint(1, 4) if n is None else n
    pts = [f"{prefix}{i}" for i in range(n)]
    return Assembly(pts, {p: Fin(rng.sample(POOL, rng.randint(1, 3))) for p in pts})


def const_map(A: Assembly, B: Assembly, rng: random.Random) -> AsmMorphism:
    """A random map realized by a constant: every point goes to ``b``."""
    b = rng.choice(B.carrier)
    return AsmMorphism(A, B, {x: b for x in A.carrier}, App(K, B.witness(b)))


# ----------------------------------------------------------------- basics

def test_witness_is_checked():
    with pytest.raises(AssemblyError):
        Assembly(["a"], {"a": Fin([K])}, {"a": S})
    with pytest.raises(AssemblyError):
        Assembly(["a"], {"a": Fin([])})


def test_check_morphism_examples():
    A = Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([S])})
    assert check_morphism(identity(A)).is_yes
    bad = AsmMorphism(A, A, {"a": "b", "b": "b"}, I, validate=False)
    r = check_morphism(bad)
    assert r.is_no and r.failures
    with pytest.raises(MorphismError):
        AsmMorphism(A, A, {"a": "b", "b": "b"}, I)


def test_non_enumerable_source_is_flagged_approximate():
    N = nabla(["p"])
    A = Assembly(["a"], {"a": Fin([K])})
    r = check_morphism(AsmMorphism(N, A, {"p": "a"}, lam("z", K), validate=False))
    assert r.is_yes and r.approximate


# ------------------------------------------------------------ (co)limits

def test_product_example():
    A = Assembly(["x"], {"x": Fin([K])})
    B = Assembly(["y"], {"y": Fin([S])})
    P = product(A, B)
    assert P.assembly.carrier == (("x", "y"),)
    assert P.assembly.witness(("x", "y")) is mk_pair(K, S)
    assert check_morphism(P.pr0).is_yes and check_morphism(P.pr1).is_yes


def test_product_with_terminal_is_iso():
    A = Assembly(["a", "b"], {"a": Fin([K, S]), "b": Fin([I])})
    P = product(A, terminal())
    v = is_iso(P.pr0, candidates=[nf(cert_pairing(I, I))])
    assert v.verdict.is_yes


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_universal_properties(seed):
    rng = random.Random(seed)
    A, B, C = rand_asm(rng, prefix="a"), rand_asm(rng, prefix="b"), rand_asm(rng, prefix="c")
    f, g = const_map(C, A, rng), const_map(C, B, rng)
    P = product(A, B)
    m = P.mediate(f, g)
    assert P.pr0.compose(m).map == f.map and P.pr1.compose(m).map == g.map

    S_ = coproduct(A, B)
    h0, h1 = const_map(A, C, rng), const_map(B, C, rng)
    cp = S_.copair(h0, h1)
    assert cp.compose(S_.inl).map == h0.map and cp.compose(S_.inr).map == h1.map

    u, v = const_map(A, B, rng), const_map(A, B, rng)
    E = equalizer(u, v)
    assert all(u.map[x] == v.map[x] for x in E.assembly.carrier)
    q = coequalizer(u, v)
    assert all(q.quotient.map[u.map[a]] == q.quotient.map[v.map[a]] for a in A.carrier)
    k = const_map(B, C, rng)
    ind = q.induce(k)
    assert ind.compose(q.quotient).map == k.map


def test_coproduct_injection_realizers():
    A = Assembly(["a"], {"a": Fin([K])})
    C = coproduct(A, A)
    assert C.assembly.witness((0, "a")) is mk_pair(K, K)
    assert C.assembly.witness((1, "a")) is mk_pair(KBAR, K)


def test_equalizer_of_equal_maps_is_everything():
    A = Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([S])})
    E = equalizer(identity(A), identity(A))
    assert E.assembly.carrier == A.carrier


def test_coequalizer_unions_realizers():
    A = Assembly(["p"], {"p": Fin([I])})
    B = Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([S])})
    f = AsmMorphism(A, B, {"p": "a"}, App(K, K))
    g = AsmMorphism(A, B, {"p": "b"}, App(K, S))
    q = coequalizer(f, g)
    (cls,) = q.assembly.carrier
    from grpdasm.rset import enumerate_set
    assert set(enumerate_set(q.assembly.real(cls))) == {K, S}


# ---------------------------------------------------------- regular epis

def test_partitioning_examples():
    A = Assembly(["x"], {"x": Fin([K, S])})
    P = partitioning(A)
    assert P.assembly.carrier == (("x", K), ("x", S))
    assert is_partitioned(P.assembly).is_yes
    v = is_regular_epi(P.pr)
    assert v.verdict.is_yes and v.certificates[1] is I
    with pytest.raises(StructuralError):
        partitioning(nabla(["p"]))


def test_regular_epi_examples():
    A = Assembly(["a"], {"a": Fin([K])})
    B = Assembly(["b", "c"], {"b": Fin([K]), "c": Fin([K])})
    assert is_regular_epi(AsmMorphism(A, B, {"a": "b"}, I)).verdict.is_no
    # a surjection whose backward certificate needs to undo k: nothing tiny does it
    C = Assembly(["c"], {"c": Fin([church(3)])})
    D = Assembly(["d"], {"d": Fin([K])})
    f = AsmMorphism(C, D, {"c": "d"}, App(K, K))
    v = is_regular_epi(f, budget=2)
    assert v.verdict.is_unknown


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_partitioning_projection_is_regular_epi(seed):
    A = rand_asm(random.Random(seed))
    v = is_regular_epi(partitioning(A).pr)
    assert v.verdict.is_yes and v.certificates == (I, I)


def test_image_factorization():
    A = Assembly(["a", "b", "c"], {"a": Fin([K]), "b": Fin([S]), "c": Fin([I])})
    B = Assembly(["u", "v", "w"], {"u": Fin([K, S]), "v": Fin([I]), "w": Fin([K])})
    f = AsmMorphism(A, B, {"a": "u", "b": "u", "c": "v"}, I)
    fac = image_factorization(f)
    assert fac.mono.compose(fac.epi).map == f.map
    assert {fac.mono.map[c] for c in fac.epi.dst.carrier} == {"u", "v"}
    # mono f: epi is an iso
    g = AsmMorphism(Assembly(["a"], {"a": Fin([K])}), B, {"a": "u"}, I)
    fac = image_factorization(g)
    assert is_iso(fac.epi).verdict.is_yes


def test_regular_epi_has_iso_mono():
    A = Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([S])})
    B = Assembly(["u"], {"u": Fin([K, S])})
    f = AsmMorphism(A, B, {"a": "u", "b": "u"}, I)
    assert is_regular_epi(f).verdict.is_yes
    assert is_iso(image_factorization(f).mono).verdict.is_yes


# -------------------------------------------------------- modest / nabla

def test_modesty():
    assert is_modest(Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([K, S])})).is_no
    assert is_modest(Assembly(["a", "b"], {"a": Fin([K]), "b": Fin([S])})).is_yes
    assert is_modest(nabla(["a", "b"])).is_no
    assert is_partitioned(nabla(["a"])).is_no


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_modest_restricts(seed):
    rng = random.Random(seed)
    A = rand_asm(rng)
    if is_modest(A).is_yes:
        sub = A.restrict(rng.sample(A.carrier, rng.randint(1, len(A))))
        assert is_modest(sub).is_yes


def test_partitioned_up_to_iso():
    A = Assembly(["a"], {"a": Fin([K, App(K, K)])})
    assert is_partitioned(A).is_no
    v = is_partitioned_upto_iso(A, budget=3)
    assert v.verdict.is_yes


def test_nabla_gamma():
    X = ["p", "q", "r"]
    assert list(gamma(nabla(X))) == X
    assert len(nabla([])) == 0
    B = Assembly(["b"], {"b": Fin([S])})
    m = AsmMorphism(nabla(X), B, {x: "b" for x in X}, lam("z", S))
    assert check_morphism(m).is_yes


# -------------------------------------------------- dependent products

def test_dependent_product_identity():
    # fibres of the identity are singletons: one section per point of Z
    Xs = Assembly(["x0", "x1"], {"x0": Fin([K]), "x1": Fin([S])})
    Zs = Assembly(["z0", "z1", "z2"], {"z0": Fin([K]), "z1": Fin([K]), "z2": Fin([S])})
    gs = AsmMorphism(Zs, Xs, {"z0": "x0", "z1": "x0", "z2": "x1"}, I)
    pi = dependent_product(identity(Xs), gs)
    assert len(pi.assembly) == 3
    assert sorted(p[1][0][1] for p in pi.assembly.carrier) == ["z0", "z1", "z2"]


def test_dependent_product_empty_and_counts():
    Y = Assembly(["y"], {"y": Fin([I])})
    Z = Assembly(["a0", "a1", "b0", "b1"], {"a0": Fin([K]), "a1": Fin([S]), "b0": Fin([K]), "b1": Fin([S])})
    g_map = {"a0": "x0", "a1": "x0", "b0": "x1", "b1": "x1"}
    # realize g honestly: choose target sets matching
    X2 = Assembly(["x0", "x1"], {"x0": Fin([K, S]), "x1": Fin([K, S])})
    f2 = AsmMorphism(X2, Y, {"x0": "y", "x1": "y"}, lam("z", I))
    g2 = AsmMorphism(Z, X2, g_map, I)
    pi = dependent_product(f2, g2, budget=5)
    assert 1 <= len(pi.assembly) <= 4
    Z3 = Assembly(["a0"], {"a0": Fin([K])})
    g3 = AsmMorphism(Z3, X2, {"a0": "x0"}, I)
    assert len(dependent_product(f2, g3).assembly) == 0


def test_dependent_product_transposes():
    Y = Assembly(["y"], {"y": Fin([I])})
    Z = Assembly(["z0", "z1"], {"z0": Fin([K, S]), "z1": Fin([K, S])})
    X2 = Assembly(["x0", "x1"], {"x0": Fin([K, S]), "x1": Fin([K, S])})
    f2 = AsmMorphism(X2, Y, {"x0": "y", "x1": "y"}, lam("z", I))
    g2 = AsmMorphism(Z, X2, {"z0": "x0", "z1": "x1"}, I)
    W = Assembly(["w"], {"w": Fin([K])})
    q = AsmMorphism(W, Y, {"w": "y"}, lam("z", I))
    base = dependent_product(f2, g2)
    P, _ = base.pullback(q)
    alpha = AsmMorphism(P, Z, {(x, "w"): {"x0": "z0", "x1": "z1"}[x] for x, _ in P.carrier}, P0)
    pi = dependent_product(f2, g2, candidates=base.transposed_candidates(q, alpha))
    beta = pi.transpose(q, alpha)
    back = pi.untranspose(q, beta)
    assert back.map == alpha.map
    assert pi_map(pi, pi, identity(Z)).map == {p: p for p in pi.assembly.carrier}
