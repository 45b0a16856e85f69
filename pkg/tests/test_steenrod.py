from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jokerkit import steenrod
from jokerkit.steenrod import A, SteenrodElement, SubalgebraSpec, adem_normalize, antipode

Sq = SteenrodElement.sq


def partitions_into(d: int, parts: list[int]) -> int:
    ways = [1] + [0] * d
    for p in parts:
        for n in range(p, d + 1):
            ways[n] += ways[n - p]
    return ways[d]


def poincare_series_A(n: int, top: int) -> list[int]:
    """Dimensions of A(n) from the dual truncated polynomial algebra."""
    series = [1] + [0] * top
    for i in range(1, n + 2):
        deg = (1 << i) - 1
        height = 1 << (n + 2 - i)
        factor = [0] * (top + 1)
        for e in range(height):
            if e * deg <= top:
                factor[e * deg] = 1
        series = [sum(series[j] * factor[k - j] for j in range(k + 1)) for k in range(top + 1)]
    return series


def test_adem_examples():
    assert Sq(2, 2) == Sq(3, 1)
    assert Sq(1, 1) == SteenrodElement.zero(2)
    assert Sq(2, 3) == Sq(5) + Sq(4, 1)
    assert not Sq(3, 2)
    assert Sq(1, 2) == Sq(3)
    assert str(Sq(2, 3)) == "Sq5 + Sq4Sq1"


def test_adem_relation_rejects_admissible_pair():
    with pytest.raises(ValueError):
        steenrod.adem_relation(4, 2)


def test_binomial_mod_two_matches_pascal():
    row = [1]
    for n in range(1, 40):
        row = [1] + [row[k - 1] + row[k] for k in range(1, n)] + [1]
        assert [steenrod.binom2(n, k) for k in range(n + 1)] == [c % 2 for c in row]


@pytest.mark.parametrize("d", range(0, 40))
def test_admissible_basis_size_counts_partitions(d):
    parts = [(1 << k) - 1 for k in range(1, 7)]
    assert len(steenrod.admissible_basis(d)) == partitions_into(d, parts)


def test_admissible_basis_order_and_shape():
    assert steenrod.admissible_basis(4) == [(4,), (3, 1)]
    for d in range(1, 20):
        basis = steenrod.admissible_basis(d)
        assert basis == sorted(basis, reverse=True)
        assert all(steenrod.is_admissible(w) and sum(w) == d for w in basis)


def test_antipode_small_values():
    assert antipode(Sq(1)) == Sq(1)
    assert antipode(Sq(2)) == Sq(2)
    assert antipode(Sq(3)) == Sq(2, 1)
    assert antipode(Sq(4)) == Sq(4) + Sq(3, 1)


@pytest.mark.parametrize("n", range(1, 17))
def test_antipode_defining_identity(n):
    acc = SteenrodElement.zero(n)
    for i in range(n + 1):
        acc = acc + Sq(i) * antipode(Sq(n - i))
    assert not acc


words = st.lists(st.integers(0, 8), min_size=1, max_size=4)


@given(words, words)
def test_antipode_is_anti_multiplicative_and_involutive(u, v):
    a, b = adem_normalize(u), adem_normalize(v)
    assert antipode(a * b) == antipode(b) * antipode(a)
    assert antipode(antipode(a)) == a


@given(words, words, words)
def test_multiplication_is_associative(u, v, w):
    a, b, c = adem_normalize(u), adem_normalize(v), adem_normalize(w)
    assert (a * b) * c == a * (b * c)


@given(st.integers(0, 24), st.integers(0, 2**20))
def test_coordinates_round_trip(d, seed):
    n = len(steenrod.admissible_basis(d))
    bits = seed & ((1 << n) - 1)
    x = steenrod.from_coordinates(d, bits)
    assert steenrod.coordinates(x) == bits


@pytest.mark.parametrize("n", [0, 1, 2])
def test_subalgebra_dimensions_match_poincare_series(n):
    tables = steenrod.algebra_tables(A(n))
    series = poincare_series_A(n, 30)
    assert [tables.dim(d) for d in range(31)] == series
    assert tables.total_dimension() == 2 ** ((n + 1) * (n + 2) // 2)


def test_subalgebra_contains_expected_elements():
    t1 = steenrod.algebra_tables(A(1))
    assert t1.express(Sq(3, 1)) != 0
    assert t1.express(Sq(5, 1)) != 0  # the top class of A(1)
    with pytest.raises(ValueError):
        t1.express(Sq(4))
    assert t1.indecomposable_index(1) is not None
    with pytest.raises(ValueError):
        t1.indecomposable_index(2)


@pytest.mark.parametrize("n", [1, 2])
def test_table_product_agrees_with_direct_multiplication(n):
    t = steenrod.algebra_tables(A(n))
    for d1 in range(0, 8):
        for d2 in range(0, 8):
            for i in range(t.dim(d1)):
                for j in range(t.dim(d2)):
                    direct = t.element(d1, i) * t.element(d2, j)
                    assert t.express(direct) == t.product(d1, i, d2, j)


def test_full_algebra_tables_span_admissible_basis():
    t = steenrod.algebra_tables(A())
    for d in range(20):
        assert t.dim(d) == len(steenrod.admissible_basis(d))
    assert t.words(4)[0] in ((4,), (2, 2), (1, 2, 1), (2, 1, 1))


def test_subalgebra_spec_parsing():
    assert SubalgebraSpec.parse("A") == A()
    assert SubalgebraSpec.parse("A(2)") == A(2)
    assert str(A(3)) == "A(3)"
    assert A(2).contains(A(1)) and not A(1).contains(A(2)) and A().contains(A(5))
    with pytest.raises(ValueError):
        SubalgebraSpec.parse("B(1)")
    with pytest.raises(ValueError):
        A(-1)
    with pytest.raises(ValueError):
        steenrod.algebra_tables(A()).complete()
