from __future__ import annotations

import pytest
from jokerkit import extres, fpmodule, sseq
from jokerkit.sseq import IllegalDifferentialError, PageElement, impose_differential, page_from_chart, turn_page
from jokerkit.steenrod import A


def chart(n: int, shift: int = 0, s_max: int = 6, t_max: int = 14):
    m = fpmodule.trivial_module(0, A(n))
    return extres.ext_chart(extres.minimal_resolution(m, s_max, t_max), shift=shift)


@pytest.fixture(scope="module")
def two_towers():
    """``Ext_A(1)`` of a point plus an ``A(0)`` tower one stem lower."""
    return page_from_chart(chart(1), chart(0, shift=1))


def test_empty_page():
    empty = extres.ext_chart(extres.minimal_resolution(fpmodule.zero_module(A(2)), 3, 6))
    p = page_from_chart(empty)
    assert p.all_classes() == []
    q = turn_page(p)
    assert q.r == 3 and q.all_classes() == []
    assert "# page=3" in q.to_tsv()


def test_tower_has_no_h0_torsion():
    p = page_from_chart(chart(0))
    assert [x.bidegree for x in p.all_classes()] == [(s, s) for s in range(7)]
    assert sseq.h0_torsion_report(p, 0) == []


def test_h1_is_h0_torsion():
    p = page_from_chart(chart(1))
    torsion = {x.bidegree for x in sseq.h0_torsion_report(p, 0)}
    assert (1, 2) in torsion and (2, 4) in torsion
    assert (0, 0) not in torsion
    assert {x.bidegree for x in sseq.h0_torsion_report(p, 2)} == {(2, 4)} | {
        b for b in torsion if b[0] >= 2
    }


def test_element_lookup_uses_true_degrees(two_towers):
    x = two_towers.element(1, 2, 2, 0)  # h0^2 on the shifted tower
    assert x.bidegree == (2, 1) and x.stem == -1
    assert two_towers.label(x) == [(1, 2, 2, 0)]


def test_wrong_bidegree_is_rejected(two_towers):
    iota = two_towers.element(0, 0, 0, 0)
    with pytest.raises(IllegalDifferentialError):
        impose_differential(two_towers, iota, two_towers.element(1, 1, 1, 0))


def test_leibniz_violation_is_rejected():
    p = page_from_chart(chart(1), chart(0))
    h1 = p.element(0, 1, 2, 0)
    h0_cubed = p.element(1, 3, 3, 0)
    # h0 h1 = 0 but h0 * h0^3 is not
    with pytest.raises(IllegalDifferentialError, match="Leibniz"):
        impose_differential(p, h1, h0_cubed)
    assert sseq.possible_targets(p, h1, 2) == []


def test_zero_target_is_allowed(two_towers):
    iota = two_towers.element(0, 0, 0, 0)
    q = impose_differential(two_towers, iota, PageElement(2, 1, 0))
    assert turn_page(q).dim((0, 0)) == 1


def test_turn_page_without_differentials_keeps_classes(two_towers):
    q = turn_page(two_towers)
    assert q.r == 3
    assert [x.bidegree for x in q.all_classes()] == [x.bidegree for x in two_towers.all_classes()]


def test_differential_propagates_along_h0(two_towers):
    p = two_towers
    iota = p.element(0, 0, 0, 0)
    target = p.element(1, 2, 2, 0)
    assert sseq.possible_targets(p, iota, 2) == [target]
    q = impose_differential(p, iota, target)
    sources = {x.bidegree for x, _ in q.differentials}
    assert {(s, s) for s in range(4)} <= sources
    e3 = turn_page(q)
    assert e3.dim((0, 0)) == 0 and e3.dim((2, 1)) == 0
    assert e3.dim((1, 0)) == 1  # h0 on the lower tower survives
    assert e3.dim((1, 2)) == 1  # h1 survives
    tsv = q.to_tsv()
    assert "d2\t0,0,0\t2,1,0" in tsv


def test_each_nonzero_differential_kills_two_classes():
    p = page_from_chart(chart(0), chart(0, shift=1))
    q = impose_differential(p, p.element(0, 0, 0, 0), p.element(1, 2, 2, 0))
    e3 = turn_page(q)
    lost = sum(p.dim(b) - e3.dim(b) for b in p.bidegrees())
    assert lost == 2 * sum(1 for _, y in q.differentials if y.bits)
    assert all(e3.dim((k, k)) == 0 for k in range(5))


def test_obstruction_argument_passes():
    data = sseq.obstruction_argument()
    failed = [s.name for s in data.steps if not s.passed]
    assert failed == []
    assert len(data.steps) == 15
    assert data.iota.stem == -15 and data.iota.s == 0
    assert data.x16.stem == -16
    assert data.y is not None and data.y.bidegree == (2, -16 + 1)
    assert data.page3.r == 3
