from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jokerkit import extres, fpmodule
from jokerkit.extres import ExtElement, minimal_resolution
from jokerkit.f2core import F2Matrix, rank, solve
from jokerkit.fpmodule import FiniteModule
from jokerkit.steenrod import A


def point(n: int) -> FiniteModule:
    return fpmodule.trivial_module(0, A(n))


@pytest.fixture(scope="module")
def tmf_chart():
    return extres.ext_chart(minimal_resolution(point(2), 6, 14))


def test_koszul_tower_over_A0():
    r = minimal_resolution(point(0), 6, 10)
    assert r.ext_dims() == {(s, s): 1 for s in range(7)}


@pytest.mark.parametrize("n", [0, 1, 2])
def test_first_ext_group_is_the_indecomposables(n):
    r = minimal_resolution(point(n), 2, 16)
    ext1 = sorted(t for (s, t), c in r.ext_dims().items() if s == 1 for _ in range(c))
    assert ext1 == [1 << i for i in range(n + 1)]


def test_ext_of_A1_point_low_range():
    dims = minimal_resolution(point(1), 4, 12).ext_dims()
    stems = sorted((t - s, s) for (s, t), c in dims.items() for _ in range(c))
    expected = [(0, s) for s in range(5)] + [(1, 1), (2, 2), (4, 3), (4, 4), (8, 4)]
    assert stems == sorted(expected)


@pytest.mark.parametrize(
    "module, s_max, t_max",
    [
        (lambda: point(1), 6, 12),
        (lambda: fpmodule.restrict(fpmodule.joker(), 1), 4, 10),
        (lambda: fpmodule.restrict(fpmodule.question_mark(), 1), 4, 10),
        (lambda: point(2), 3, 10),
    ],
)
def test_resolution_agrees_with_bar_complex(module, s_max, t_max):
    m = module()
    got = minimal_resolution(m, s_max, t_max).ext_dims()
    assert got == extres.bar_complex_ext_dims(m, s_max, t_max)


@pytest.mark.parametrize(
    "module",
    [lambda: point(2), lambda: fpmodule.restrict(fpmodule.joker(), 2), lambda: fpmodule.restrict(fpmodule.joker(), 1)],
)
def test_resolution_self_checks(module):
    r = minimal_resolution(module(), 5, 16)
    assert r.check_d_squared()
    assert r.check_minimality()
    assert r.check_exactness()


def test_full_algebra_is_rejected():
    with pytest.raises(ValueError):
        minimal_resolution(fpmodule.trivial_module(0), 2, 4)


def test_resource_bound_keeps_partial_result():
    with pytest.raises(extres.ResolutionLimitError) as info:
        minimal_resolution(point(2), 8, 30, max_dim=20)
    assert info.value.partial.gens[0] == [0]


def test_products_over_A2(tmf_chart):
    c = tmf_chart
    one = c.element(0, 0, 0)
    h0, h1, h2 = (c.h(i, one) for i in range(3))
    assert h0 and h1 and h2
    assert not c.h(1, h0)  # h0 h1 = 0
    assert not c.h(2, h1)  # h1 h2 = 0
    h1_cubed = c.h_word((1, 1, 1), one)
    assert h1_cubed and h1_cubed == c.h_word((0, 0, 2), one)
    assert not c.h_word((0, 0, 0, 2), one)
    assert c.h_word((0, 0, 0, 0), one)


def test_products_commute(tmf_chart):
    c = tmf_chart
    for s, t, idx in c.classes():
        x = c.element(s, t, idx)
        for i in range(3):
            for j in range(i + 1, 3):
                a, b = c.h_word((i, j), x), c.h_word((j, i), x)
                if a is not None and b is not None:
                    assert a == b


def test_products_outside_range_are_unknown(tmf_chart):
    top = ExtElement(tmf_chart.s_max, tmf_chart.s_max, 1)
    assert tmf_chart.h(0, top) is None
    assert not tmf_chart.product_known(3, 0, 0)


def test_annihilators(tmf_chart):
    ann = extres.annihilators(tmf_chart, (0, 0, 0))
    assert (0, 1) in ann and (1, 2) in ann
    assert (0,) not in ann and (2, 2) not in ann
    assert extres.annihilators(tmf_chart, ExtElement(0, 0, 0)) == extres.H_MONOMIALS


def test_tsv_is_deterministic_and_headed():
    m = fpmodule.restrict(fpmodule.joker(), 2)
    a = extres.ext_chart(minimal_resolution(m, 4, 12), shift=3).to_tsv()
    b = extres.ext_chart(minimal_resolution(m, 4, 12), shift=3).to_tsv()
    assert a == b
    assert a.startswith(f"# module={extres.module_hash(m)} shift=3\n")
    assert "0\t0\t0\n" in a and "h2\t0,0,0\t1,4,0\n" in a
    assert "h0\t0,0,0\t" not in a  # Sq1 is nonzero on the bottom class


def test_identity_lift_induces_identity():
    m = fpmodule.restrict(fpmodule.joker(), 2)
    r = minimal_resolution(m, 4, 14)
    lifts = extres.lift_module_map(r, r, extres.identity_map(m))
    f = extres.induced_ext_map(r, r, lifts)
    c = extres.ext_chart(r, with_products=False)
    for s, t, idx in c.classes():
        x = c.element(s, t, idx)
        assert f(x) == x


def test_quotient_map_onto_bottom_class():
    j = fpmodule.restrict(fpmodule.joker(), 1)
    rj = minimal_resolution(j, 3, 10)
    rp = minimal_resolution(point(1), 3, 10)
    lifts = extres.lift_module_map(rj, rp, {0: F2Matrix.identity(1)})
    f = extres.induced_ext_map(rj, rp, lifts)
    cp = extres.ext_chart(rp)
    one = cp.element(0, 0, 0)
    assert f(one) == ExtElement(0, 0, 1)
    # naturality: h0 and h1 kill the generator of Ext(J)
    assert not f(cp.h(0, one)) and not f(cp.h(1, one))


def _random_invertible(n: int, rng: random.Random):
    while True:
        m = F2Matrix([rng.getrandbits(n) for _ in range(n)], n)
        if rank(m) == n:
            break
    inv = F2Matrix.from_columns([solve(m, _unit(n, j)).bits for j in range(n)], n)
    return m, inv


def _unit(n, j):
    from jokerkit.f2core import F2Vector

    return F2Vector(n, 1 << j)


def change_basis(m: FiniteModule, rng: random.Random) -> FiniteModule:
    mats = {d: _random_invertible(n, rng) for d, n in m.dims.items()}
    actions = {}
    for (k, d), a in m.actions.items():
        p, _ = mats[d + (1 << k)]
        _, q_inv = mats[d]
        actions[(k, d)] = p @ a @ q_inv
    return FiniteModule(m.algebra, m.dims, actions)


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_ext_is_basis_independent(seed):
    rng = random.Random(seed)
    base = fpmodule.restrict(
        fpmodule.direct_sum(fpmodule.joker(), fpmodule.suspend(fpmodule.question_mark(), 1)), 1
    )
    other = change_basis(base, rng)
    r1, r2 = minimal_resolution(base, 4, 12), minimal_resolution(other, 4, 12)
    assert r1.ext_dims() == r2.ext_dims()
    c1, c2 = extres.ext_chart(r1), extres.ext_chart(r2)
    for i in c1.h_exponents:
        for (s, t), n in c1.counts.items():
            ranks = []
            for c in (c1, c2):
                images = [c.h(i, c.element(s, t, j)) for j in range(n)]
                if any(x is None for x in images):
                    break
                ranks.append(rank(F2Matrix([x.bits for x in images], c.count(s + 1, t + (1 << i)))))
            if len(ranks) == 2:
                assert ranks[0] == ranks[1]
