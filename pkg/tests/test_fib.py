from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from grpdasm.fib import (
    FibrationWitness, LiftError, SDRData, SDSData, comma_factorize, dependent_product_fib, fiber, find_sds,
    find_normal_isofib, frobenius, identity_sds, path_sds, pullback, pullback_power, pullp, slice_homs,
    solve_lift, squares, verify_sdr, verify_sds,
)
from grpdasm.grpd import (
    GFunctor, connected, constant_functor, cyclic_group, discrete, functor_failures, functors,
    groupoid_from_components, identity_functor, interval, law_failures, natiso_failures, path_object, terminal_groupoid,
)
from grpdasm.asm import check_morphism

from instances import rand_groupoid, rand_pi_instance, some_functor

seeds = st.integers(0, 10**6)


def point_at(Y, y):
    return constant_functor(terminal_groupoid(), Y, y)


# ----------------------------------------------------------- isofibrations

def test_point_of_interval_is_not_a_fibration():
    assert find_normal_isofib(point_at(interval(), 0)) is None


def test_identity_and_terminal_maps_are_fibrations():
    G = groupoid_from_components([(["a", "b"], 2)])
    assert find_normal_isofib(identity_functor(G)) is not None
    assert find_normal_isofib(constant_functor(G, terminal_groupoid(), "*")) is not None


def test_witness_rejects_non_normal_table():
    G = cyclic_group(2)
    F = identity_functor(G)
    with pytest.raises(LiftError):
        FibrationWitness(F, {("*", 0): 1, ("*", 1): 1})


def test_path_boundary_is_a_fibration():
    po = path_object(connected(["x", "y"], order=2))
    assert find_normal_isofib(po.boundary) is not None


# ----------------------------------------------------------- factorization

def test_comma_of_point_in_interval():
    fac = comma_factorize(point_at(interval(), 0))
    assert set(fac.comma.objects) == {("*", 0, "id0"), ("*", 1, "line")}
    assert fac.hat.compose(fac.tilde).same_as(fac.F)
    assert verify_sds(fac.tilde, fac.sds)
    assert find_normal_isofib(fac.hat) is not None
    assert not fac.witness.failures()


def test_comma_of_identity_is_arrow_groupoid():
    X = connected(["x", "y"], order=2)
    fac = comma_factorize(identity_functor(X))
    assert len(fac.comma.objects) == len(X.morphisms)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_factorization_laws(seed):
    rng = random.Random(seed)
    A, B = rand_groupoid(rng, prefix="a"), rand_groupoid(rng, prefix="b")
    F = some_functor(rng, A, B)
    fac = comma_factorize(F)
    assert fac.hat.compose(fac.tilde).same_as(F)
    assert find_normal_isofib(fac.hat) is not None
    assert verify_sds(fac.tilde, fac.sds).ok
    # the construction skips its own law checks
    assert law_failures(fac.comma) == []
    assert not any(functor_failures(G) for G in (fac.tilde, fac.hat, fac.sds.retraction))


def test_comma_realizers_check():
    fac = comma_factorize(point_at(interval(), 0))
    assert fac.comma.check_realizers().is_yes
    assert fac.tilde.check_realizers().is_yes
    assert fac.hat.check_realizers().is_yes


# ------------------------------------------------------- deformation data

def test_identity_sds_and_broken_beta():
    G = connected(["x", "y"])
    j, data = identity_sds(G)
    assert verify_sds(j, data)
    G2 = cyclic_group(2)
    j2, data2 = identity_sds(G2)
    r = verify_sds(j2, SDSData(data2.retraction, {"*": 1}))
    assert not r.ok and r.failures


def test_sigma_of_path_object_is_sds():
    for X in (connected(["x", "y"]), cyclic_group(2)):
        po = path_object(X)
        assert verify_sds(po.sigma, path_sds(po)).ok


def test_sdr_for_the_arrow_groupoid():
    X = cyclic_group(2)
    fac = comma_factorize(identity_functor(X))
    C = fac.comma
    index = {(m[0], m[1], m[2]): m for m in C.morphisms}
    alpha = {}
    for o in C.objects:
        a, b, f = o
        alpha[o] = index[((b, b, X.ident[b]), o, X.inv[f])]
    assert verify_sdr(fac.hat, SDRData(fac.tilde, alpha)).ok
    wrong = dict(alpha)
    wrong[("*", "*", 1)] = index[(("*", "*", 0), ("*", "*", 1), 0)]
    assert not verify_sdr(fac.hat, SDRData(fac.tilde, wrong)).ok


# ---------------------------------------------------------------- lifting

def _square_from_retraction(rng, j, data, F):
    s = some_functor(rng, j.src, F.src)
    return s, F.compose(s).compose(data.retraction)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_solve_lift_closes_squares(seed):
    rng = random.Random(seed)
    A, B = rand_groupoid(rng, prefix="a"), rand_groupoid(rng, prefix="b")
    G = some_functor(rng, A, B)
    j = comma_factorize(G)
    X, Y = rand_groupoid(rng, prefix="x"), rand_groupoid(rng, prefix="y")
    f = comma_factorize(some_functor(rng, X, Y))
    for _ in range(3):
        s, t = _square_from_retraction(rng, j.tilde, j.sds, f.hat)
        d = solve_lift(j.tilde, j.sds, f.hat, f.witness, s, t)
        assert d.compose(j.tilde).same_as(s) and f.hat.compose(d).same_as(t)


def test_solve_lift_rejects_non_square():
    Iv = interval()
    fac = comma_factorize(point_at(Iv, 0))
    j, data = identity_sds(terminal_groupoid())
    fw = find_normal_isofib(fac.hat)
    s = constant_functor(terminal_groupoid(), fac.comma, ("*", 0, "id0"))
    t = point_at(Iv, 1)
    with pytest.raises(LiftError):
        solve_lift(j, data, fac.hat, fw, s, t)


def test_lift_against_path_sigma():
    X = connected(["x", "y"])
    po = path_object(X)
    data = path_sds(po)
    fac = comma_factorize(constant_functor(X, cyclic_group(2), "*"))
    rng = random.Random(3)
    for _ in range(5):
        s = some_functor(rng, X, fac.comma)
        t = fac.hat.compose(s).compose(data.retraction)
        d = solve_lift(po.sigma, data, fac.hat, fac.witness, s, t)
        assert d.compose(po.sigma).same_as(s)


def test_non_fibration_has_unfillable_square():
    # j = F̃ for the point itself, s = id, t = F̂: a diagonal would be a
    # functor from the comma to the point lying over all of 𝕀
    p = point_at(interval(), 0)
    fac = comma_factorize(p)
    assert verify_sds(fac.tilde, fac.sds)
    assert p.compose(identity_functor(p.src)).same_as(fac.hat.compose(fac.tilde))
    diagonals = [d for d in functors(fac.comma, p.src) if p.compose(d).same_as(fac.hat)]
    assert diagonals == []
    assert find_normal_isofib(p) is None


# ------------------------------------------------------ fibers, transport

def test_transport_identity_is_identity():
    fac = comma_factorize(constant_functor(connected(["x", "y"]), cyclic_group(2), "*"))
    fw = fac.witness
    for b in fac.hat.dst.objects:
        T = fw.transport(fac.hat.dst.ident[b])
        assert T.same_as(identity_functor(T.src))


def test_path_transport_conjugates():
    X = connected(["x", "y"], order=2)
    po = path_object(X)
    fw = find_normal_isofib(po.boundary)
    XX = po.square.groupoid
    for q in XX.morphisms:
        t, t2 = q
        T = fw.transport(q)
        for p in T.src.objects:
            assert T.ob[p].mor["line"] == X.chain([X.inv[t], p.mor["line"], t2])


def test_coherence_with_inverse():
    fac = comma_factorize(constant_functor(connected(["x", "y"]), cyclic_group(2), "*"))
    fw, Y = fac.witness, fac.hat.dst
    for p in Y.morphisms:
        c = fw.coherence(p, Y.inv[p])
        assert not natiso_failures(c)
        S, _ = fw.fiber(Y.dom[p])
        for a, m in c.component.items():
            assert fac.comma.dom[m] == c.F.ob[a] and fac.comma.cod[m] == a


def test_fiber_is_preimage():
    fac = comma_factorize(point_at(interval(), 0))
    S, inc = fiber(fac.hat, 1)
    assert S.objects == (("*", 1, "line"),)


# ------------------------------------------------------------- Frobenius

def test_pullback_along_identity_is_domain():
    G = connected(["a", "b"])
    F = some_functor(random.Random(0), G, cyclic_group(2))
    P = pullback(F, identity_functor(F.dst))
    assert len(P.groupoid.objects) == len(G.objects)
    assert len(P.groupoid.morphisms) == len(G.morphisms)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_frobenius(seed):
    rng = random.Random(seed)
    A, B = rand_groupoid(rng, prefix="a"), rand_groupoid(rng, prefix="b")
    j = comma_factorize(some_functor(rng, A, B))
    X = rand_groupoid(rng, prefix="x")
    f = comma_factorize(some_functor(rng, X, j.comma))
    P, data = frobenius(f.hat, f.witness, j.tilde, j.sds)
    assert verify_sds(P.left, data).ok


# -------------------------------------------------------- pullback power

def test_pullback_power_of_endpoint_inclusion():
    Iv = interval()
    i = point_at(Iv, 0)
    X = connected(["x", "y"])
    f = comma_factorize(constant_functor(X, cyclic_group(2), "*"))
    pp = pullback_power(i, f.hat, f.witness)
    assert pp.witness is not None and not pp.witness.failures()


def test_pullback_power_along_identity_is_iso_to_f():
    X = connected(["x", "y"])
    f = comma_factorize(constant_functor(X, cyclic_group(2), "*"))
    T = terminal_groupoid()
    pp = pullback_power(identity_functor(T), f.hat, f.witness)
    assert len(pp.source.groupoid.objects) == len(pp.target.objects)
    assert len(set(pp.functor.mor.values())) == len(pp.target.morphisms)


def test_pullback_power_rejects_non_mono():
    two = discrete(["p", "q"])
    i = constant_functor(two, terminal_groupoid(), "*")
    f = identity_functor(terminal_groupoid())
    with pytest.raises(ValueError):
        pullback_power(i, f)


# --------------------------------------------------------------- squares

def test_squares_and_pullp():
    Iv = interval()
    i = point_at(Iv, 0)
    f = identity_functor(cyclic_group(2))
    sq = squares(i, f)
    m = pullp(i, f, sq)
    assert len(sq) == len(m.dst)
    assert check_morphism(m).is_yes
    # against ∅ → 1 a square is a point of the base and pullp is f on objects
    empty = discrete([])
    bang = GFunctor(empty, terminal_groupoid(), {}, {})
    X, Y = discrete(["x", "y", "z"]), discrete(["p", "q"])
    g = GFunctor(X, Y, {"x": "p", "y": "p", "z": "q"}, {("id", "x"): ("id", "p"), ("id", "y"): ("id", "p"),
                                                       ("id", "z"): ("id", "q")})
    sq = squares(bang, g)
    assert len(sq) == 2
    m = pullp(bang, g, sq)
    assert sorted(v.ob["*"] for _, v in m.map.values()) == ["p", "p", "q"]


# ---------------------------------------------------- dependent products

def _pi_counts(F, G, X):
    fw = find_normal_isofib(F)
    pi = dependent_product_fib(F, fw, G)
    pb = pullback(X, F)
    left = slice_homs(pb.right, G)
    right = slice_homs(X, pi.proj)
    return pi, pb, left, right


def test_dependent_product_along_identity():
    N = connected(["a", "b"])
    P = groupoid_from_components([(["p", "q", "r"], 1)])
    G = some_functor(random.Random(1), P, N)
    pi = dependent_product_fib(identity_functor(N), find_normal_isofib(identity_functor(N)), G)
    assert len(pi.groupoid.objects) == len(P.objects)
    assert len(pi.groupoid.morphisms) == len(P.morphisms)


def test_dependent_product_two_object_fiber():
    N = connected(["n0", "n1"])
    M = terminal_groupoid()
    F = constant_functor(N, M, "*")
    P = connected(["p0", "p1", "p2", "p3"])
    G = GFunctor(P, N, {"p0": "n0", "p1": "n0", "p2": "n1", "p3": "n1"},
                 {m: (lambda d, c: next(iter(N.hom(d, c))))(*[{"p0": "n0", "p1": "n0", "p2": "n1",
                                                              "p3": "n1"}[z] for z in (P.dom[m], P.cod[m])])
                  for m in P.morphisms})
    X = identity_functor(M)
    pi, pb, left, right = _pi_counts(F, G, X)
    assert len(pi.groupoid.objects) == 4
    assert len(left) == len(right) == 4


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_dependent_product_transposes(seed):
    F, fw, G, X = rand_pi_instance(random.Random(seed))
    pi = dependent_product_fib(F, fw, G)
    pb = pullback(X, F)
    left = slice_homs(pb.right, G)
    right = slice_homs(X, pi.proj)
    assert len(left) == len(right)
    for Z in left:
        W = pi.transpose(X, Z, pb)
        assert pi.proj.compose(W).same_as(X)
        assert pi.untranspose(X, W, pb).same_as(Z)
    assert find_normal_isofib(pi.proj) is not None


def test_find_sds():
    j, _ = identity_sds(interval())
    data = find_sds(j)
    assert data is not None and verify_sds(j, data)
    po = path_object(interval())
    data = find_sds(po.sigma)
    assert data is not None and verify_sds(po.sigma, data)
    # the point of the discrete two-point groupoid has no retraction homotopic to the identity
    assert find_sds(point_at(discrete(["a", "b"]), "a")) is None


def test_comma_sds_is_found_by_search():
    F = constant_functor(interval(), cyclic_group(2), "*")
    cf = comma_factorize(F)
    data = find_sds(cf.tilde)
    assert data is not None and verify_sds(cf.tilde, data)
