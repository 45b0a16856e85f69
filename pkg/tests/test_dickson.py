from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jokerkit import dickson, fpmodule
from jokerkit.dickson import Polynomial


def total_square_by_substitution(p: Polynomial) -> Polynomial:
    """Total square as the ring map ``t -> t + t^2``, expanded by multiplication."""
    n = p.nvars
    images = [Polynomial.variable(n, i) + Polynomial.variable(n, i).square() for i in range(n)]
    return p.substitute(images)


def t(n, *exps):
    return Polynomial.from_exponents(n, [exps])


def test_rank_two_generators():
    pres = dickson.dickson_generators(2)
    assert pres.degrees == [2, 3]
    assert pres.generator(2) == Polynomial.from_exponents(2, [(2, 0), (1, 1), (0, 2)])
    assert pres.generator(3) == Polynomial.from_exponents(2, [(2, 1), (1, 2)])


def test_rank_one_generator_is_the_variable():
    assert dickson.dickson_generators(1).generator(1) == Polynomial.variable(1, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_generator_degrees_ladder_and_invariance(n):
    pres = dickson.dickson_generators(n)
    assert pres.degrees == sorted((1 << n) - (1 << i) for i in range(n))
    assert dickson.ladder_holds(n)
    assert all(dickson.is_invariant(g) for g in pres.generators.values())


def test_rank_is_bounded():
    with pytest.raises(ValueError):
        dickson.dickson_generators(5)
    with pytest.raises(ValueError):
        dickson.dickson_generators(0)


def test_named_squares():
    pres3 = dickson.dickson_generators(3)
    assert dickson.steenrod_square(2, pres3.generator(4)) == pres3.generator(6)
    assert dickson.steenrod_square(1, pres3.generator(6)) == pres3.generator(7)
    assert not dickson.steenrod_square(1, pres3.generator(4))
    pres4 = dickson.dickson_generators(4)
    assert dickson.steenrod_square(4, pres4.generator(8)) == pres4.generator(12)
    assert dickson.steenrod_square(8, pres4.generator(8)) == pres4.generator(8).square()


polys = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(0, 4)] * n), min_size=1, max_size=4).map(
        lambda ms: Polynomial.from_exponents(n, ms)
    )
).filter(bool)


@given(polys)
def test_total_square_matches_substitution(p):
    for d in p.degrees():
        q = p.component(d)
        assert sum(dickson.total_square(q), Polynomial.zero(q.nvars)) == total_square_by_substitution(q)


@given(polys, polys)
def test_cartan_formula(p, q):
    if p.nvars != q.nvars:
        return
    p = p.component(max(p.degrees()))
    q = q.component(max(q.degrees()))
    sp, sq_ = dickson.total_square(p), dickson.total_square(q)
    spq = dickson.total_square(p * q)
    for k in range(len(spq)):
        expect = Polynomial.zero(p.nvars)
        for i in range(k + 1):
            if i < len(sp) and k - i < len(sq_):
                expect = expect + sp[i] * sq_[k - i]
        assert spq[k] == expect


@pytest.mark.parametrize("n", [2, 3])
def test_generator_total_squares_match_direct_route(n):
    pres = dickson.dickson_generators(n)
    for m, comps in dickson.generator_total_squares(n).items():
        direct = dickson.total_square(pres.generator(m))
        for j, expr in enumerate(comps):
            value = Polynomial.zero(n)
            for a in expr:
                value = value + pres.evaluate(a)
            assert value == direct[j]


def test_express_rejects_non_invariants():
    with pytest.raises(dickson.NotInSubalgebraError):
        dickson.express_in_generators(t(2, 1, 0), dickson.dickson_generators(2))
    with pytest.raises(dickson.NotInSubalgebraError):
        dickson.express_in_generators(t(2, 2, 0), dickson.dickson_generators(2))
    pres = dickson.dickson_generators(2)
    x = pres.generator(2) ** 3 + pres.generator(3) ** 2
    assert dickson.express_in_generators(x, pres) == frozenset({(3, 0), (0, 2)})


def test_skeleton_rank_two():
    m = dickson.skeleton_module(2, 12)
    counts = {d: sum(1 for a in range(7) for b in range(5) if 2 * a + 3 * b == d) for d in range(1, 13)}
    assert m.dims == {d: c for d, c in counts.items() if c}
    assert m.names[6] == ("x2^3", "x3^2")
    assert fpmodule.is_unstable(m)


def test_skeleton_rank_three_names():
    m = dickson.skeleton_module(3, 14)
    assert m.names[4] == ("x4",) and m.names[7] == ("x7",)
    assert m.names[11] == ("x4x7",)
    assert set(m.names[12]) == {"x4^3", "x6^2"}
    assert fpmodule.is_unstable(m)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_joker_quotients_are_certified(k):
    q, cert = dickson.joker_quotient(k)
    target = fpmodule.suspend(fpmodule.double(fpmodule.joker(), k), 2 << k)
    assert cert is not None
    assert fpmodule.is_module_map(cert, q, target)
    assert all(cert[d].rank() == q.dim(d) for d in q.degrees)
    removed = set(dickson.JOKER_QUOTIENT_CLASSES[k])
    assert not removed & {n for names in q.names.values() for n in names}


def test_y_module():
    y = dickson.build_Y_module()
    assert sorted(y.dims) == [8, 12, 14, 15, 16, 20, 22, 23, 24]
    assert y.total_dim == 9
    lo, hi = fpmodule.split_at(fpmodule.restrict(y, 2), 15)
    assert sorted(lo.dims) == [8, 12, 14, 15]
    with pytest.raises(fpmodule.NotADirectSumError):
        fpmodule.split_at(y, 15)
    assert not y.sq(8, 8).is_zero()
    with pytest.raises(ValueError):
        dickson.build_Y_module(20)


def test_polynomial_helpers():
    p = t(2, 1, 2)
    assert str(p) == "t1*t2^2"
    assert p.degree == 3
    assert (p + p).degree is None
    with pytest.raises(ValueError):
        (p + t(2, 1, 0)).degree
    with pytest.raises(ValueError):
        Polynomial.from_exponents(2, [(1,)])
