from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jokerkit import f2core
from jokerkit.f2core import EchelonBasis, F2Matrix, F2Vector, kernel_basis, rank, rref, rref_rows, solve


def dense_rref(rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Textbook Gauss-Jordan on lists, used as an oracle."""
    m = [r[:] for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                m[i] = [a ^ b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


matrices = st.integers(0, 9).flatmap(
    lambda nr: st.integers(1, 9).flatmap(
        lambda nc: st.lists(st.lists(st.integers(0, 1), min_size=nc, max_size=nc), min_size=nr, max_size=nr).map(
            lambda rows: F2Matrix.from_lists(rows, nc)
        )
    )
)


def test_vector_basics():
    v = F2Vector.from_list([1, 0, 1])
    w = F2Vector.from_list([1, 1, 0])
    assert (v + w).to_list() == [0, 1, 1]
    assert v.dot(w) == 1
    assert v.weight() == 2
    with pytest.raises(ValueError):
        F2Vector(2, 0b100)
    with pytest.raises(ValueError):
        v + F2Vector(4, 0)


def test_matrix_product_and_transpose():
    a = F2Matrix.from_lists([[1, 1, 0], [0, 1, 1]])
    b = F2Matrix.from_lists([[1, 0], [1, 1], [0, 1]])
    assert (a @ b).to_lists() == [[0, 1], [1, 0]]
    assert a.transpose().to_lists() == [[1, 0], [1, 1], [0, 1]]
    assert a @ F2Vector.from_list([1, 1, 1]) == F2Vector.from_list([0, 0])
    with pytest.raises(ValueError):
        a @ a


def test_rref_small_example():
    m = F2Matrix.from_lists([[0, 1, 1], [1, 1, 0], [1, 0, 1]])
    red, pivots = rref(m)
    assert red.to_lists() == [[1, 0, 1], [0, 1, 1], [0, 0, 0]]
    assert pivots == [0, 1]


def test_identity_and_zero():
    assert rref(F2Matrix.identity(4))[0] == F2Matrix.identity(4)
    assert rank(F2Matrix.zeros(3, 5)) == 0
    assert len(kernel_basis(F2Matrix.zeros(3, 5))) == 5


def test_solve_consistent_and_not():
    m = F2Matrix.from_lists([[1, 1], [0, 0]])
    assert solve(m, F2Vector.from_list([1, 1])) is None
    x = solve(m, F2Vector.from_list([1, 0]))
    assert m @ x == F2Vector.from_list([1, 0])
    with pytest.raises(ValueError):
        solve(m, F2Vector.from_list([1, 0, 0]))


@given(matrices)
def test_rref_matches_dense_oracle(m):
    red, pivots = rref(m)
    expect, expect_piv = dense_rref(m.to_lists()) if m.nrows else ([], [])
    assert pivots == expect_piv
    assert red.to_lists() == expect


@given(matrices)
def test_rref_is_idempotent(m):
    red, _ = rref(m)
    assert rref(red)[0] == red


@given(matrices)
def test_kernel_dimension_and_vanishing(m):
    ker = kernel_basis(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        assert not (m @ v)
    assert rank(F2Matrix([v.bits for v in ker], m.cols)) == len(ker)


@given(matrices, st.integers(0, 2**9))
def test_solve_returns_a_solution(m, seed):
    b = F2Vector(m.nrows, seed & ((1 << m.nrows) - 1))
    x = solve(m, b)
    if x is not None:
        assert m @ x == b
    else:
        aug = F2Matrix([r | (((b.bits >> i) & 1) << m.cols) for i, r in enumerate(m.rows)], m.cols + 1)
        assert rank(aug) == rank(m) + 1


@pytest.mark.skipif(not f2core.compiled_available(), reason="compiled kernel not built")
@given(st.integers(1, 150), st.integers(1, 150), st.randoms(use_true_random=False))
def test_compiled_and_python_backends_agree(nrows, ncols, rnd):
    rows = [rnd.getrandbits(ncols) for _ in range(nrows)]
    assert rref_rows(rows, ncols, backend="compiled") == rref_rows(rows, ncols, backend="python")


def test_echelon_tags_give_dependencies():
    e = EchelonBasis(track=True)
    assert e.add(0b011) == (True, 0b001)
    assert e.add(0b110)[0]
    independent, tag = e.add(0b101)
    assert not independent
    assert tag == 0b111  # the three offered vectors sum to zero
    residual, tag = e.reduce(0b110)
    assert residual == 0 and tag == 0b010


@given(st.lists(st.integers(0, 255), max_size=12))
def test_echelon_reduce_reconstructs(vectors):
    e = EchelonBasis(track=True)
    for v in vectors:
        e.add(v)
    for v in vectors:
        residual, tag = e.reduce(v)
        assert residual == 0
        acc = 0
        for j, w in enumerate(vectors):
            if (tag >> j) & 1:
                acc ^= w
        assert acc == v


def test_environment_variable_forces_pure_python():
    import os
    import subprocess
    import sys

    env = dict(os.environ, JOKERKIT_PURE_PYTHON="1")
    code = "from jokerkit import f2core; print(f2core.compiled_available())"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"


def test_unknown_backend_is_rejected():
    with pytest.raises(ValueError):
        rref_rows([1], 1, backend="fortran")
