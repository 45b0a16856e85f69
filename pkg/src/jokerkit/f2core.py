"""Exact linear algebra over GF(2).

Vectors and matrix rows are packed into Python integers (bit ``j`` is
coordinate ``j``).  Row reduction always pivots on the leftmost nonzero
column, so the reduced row-echelon form is canonical.  Large eliminations
go through the compiled kernel in :mod:`jokerkit._f2kernel` when it is
importable; the pure-Python path gives bit-identical results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

try:  # pragma: no cover - exercised implicitly when the extension is built
    from jokerkit import _f2kernel as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

# Elimination below this many matrix entries stays in Python; the packing
# overhead dominates for small systems.
COMPILED_THRESHOLD = 64 * 64


def compiled_available() -> bool:
    return _compiled is not None and not os.environ.get("JOKERKIT_PURE_PYTHON")


@dataclass(frozen=True)
class F2Vector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set outside vector length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "F2Vector":
        bits = 0
        for j, v in enumerate(values):
            if v & 1:
                bits |= 1 << j
        return cls(len(values), bits)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __add__(self, other: "F2Vector") -> "F2Vector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return F2Vector(self.length, self.bits ^ other.bits)

    __sub__ = __add__

    def __bool__(self) -> bool:
        return self.bits != 0

    def dot(self, other: "F2Vector") -> int:
        return (self.bits & other.bits).bit_count() & 1

    def weight(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())


class F2Matrix:
    """Immutable ``nrows x cols`` matrix; ``rows[i]`` packs row ``i``."""

    __slots__ = ("rows", "cols", "_hash")

    def __init__(self, rows: Iterable[int], cols: int):
        rows = tuple(rows)
        limit = 1 << cols
        for r in rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits outside column range")
        self.rows = rows
        self.cols = cols
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, cols: int) -> "F2Matrix":
        return cls((0,) * nrows, cols)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls((1 << i for i in range(n)), n)

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "F2Matrix":
        if cols is None:
            cols = len(data[0]) if data else 0
        rows = []
        for row in data:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            rows.append(F2Vector.from_list(row).bits)
        return cls(rows, cols)

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "F2Matrix":
        rows = [0] * nrows
        for j, c in enumerate(columns):
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(rows, len(columns))

    # accessors ----------------------------------------------------------
    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    def row(self, i: int) -> F2Vector:
        return F2Vector(self.cols, self.rows[i])

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.rows]

    def columns(self) -> list[int]:
        return transpose_rows(self.rows, self.cols)

    def is_zero(self) -> bool:
        return not any(self.rows)

    # algebra ------------------------------------------------------------
    def transpose(self) -> "F2Matrix":
        return F2Matrix(transpose_rows(self.rows, self.cols), self.nrows)

    def apply(self, v: int) -> int:
        """Return ``self @ v`` with ``v`` and the result packed as ints."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other):
        if isinstance(other, F2Vector):
            if other.length != self.cols:
                raise ValueError("dimension mismatch")
            return F2Vector(self.nrows, self.apply(other.bits))
        if isinstance(other, F2Matrix):
            if other.nrows != self.cols:
                raise ValueError("dimension mismatch")
            return F2Matrix(mul_rows(self.rows, other.rows), other.cols)
        return NotImplemented

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return F2Matrix((a ^ b for a, b in zip(self.rows, other.rows)), self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, F2Matrix):
            return NotImplemented
        return self.cols == other.cols and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols))
        return self._hash

    def __repr__(self) -> str:
        return f"F2Matrix({self.to_lists()!r})"

    def rank(self) -> int:
        return rank_rows(self.rows, self.cols)


def mul_rows(a_rows: Sequence[int], b_rows: Sequence[int]) -> list[int]:
    out = []
    for r in a_rows:
        acc = 0
        while r:
            low = r & -r
            acc ^= b_rows[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return out


def transpose_rows(rows: Sequence[int], cols: int) -> list[int]:
    out = [0] * cols
    for i, r in enumerate(rows):
        bit = 1 << i
        while r:
            low = r & -r
            out[low.bit_length() - 1] |= bit
            r ^= low
    return out


# --------------------------------------------------------------------------
# row reduction


def _rref_python(rows: Sequence[int]) -> tuple[list[int], list[int]]:
    basis: dict[int, int] = {}
    for v in rows:
        while v:
            low = v & -v
            p = low.bit_length() - 1
            b = basis.get(p)
            if b is None:
                basis[p] = v
                break
            v ^= b
    if not basis:
        return [], []
    pivots = sorted(basis)
    pivmask = 0
    for p in pivots:
        pivmask |= 1 << p
    # back substitution from the largest pivot down; each basis row used is
    # already fully reduced, so XORing it never reintroduces pivot bits
    for p in reversed(pivots):
        row = basis[p]
        m = row & pivmask & ~((2 << p) - 1)
        while m:
            low = m & -m
            row ^= basis[low.bit_length() - 1]
            m ^= low
        basis[p] = row
    return [basis[p] for p in pivots], pivots


def _pack(rows: Sequence[int], cols: int):
    import numpy as np

    nwords = max(1, (cols + 63) // 64)
    nbytes = nwords * 8
    buf = b"".join(r.to_bytes(nbytes, "little") for r in rows)
    return np.frombuffer(buf, dtype=np.uint64).reshape(len(rows), nwords).copy()


def _unpack(arr, nrows: int) -> list[int]:
    return [int.from_bytes(arr[i].tobytes(), "little") for i in range(nrows)]


def rref_rows(rows: Sequence[int], cols: int, backend: str | None = None) -> tuple[list[int], list[int]]:
    """Reduced row-echelon form of packed rows; zero rows are dropped.

    ``backend`` is ``"python"``, ``"compiled"`` or ``None`` (automatic).
    """
    if backend is None:
        backend = "compiled" if compiled_available() and len(rows) * cols >= COMPILED_THRESHOLD else "python"
    if backend not in ("python", "compiled"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "python" or not rows:
        return _rref_python(rows)
    if _compiled is None:
        raise RuntimeError("compiled kernel not built")
    arr = _pack(rows, cols)
    pivots = list(_compiled.rref_words(arr, cols))
    return _unpack(arr, len(pivots)), pivots


def rank_rows(rows: Sequence[int], cols: int) -> int:
    return len(rref_rows(rows, cols)[1])


def rref(m: F2Matrix) -> tuple[F2Matrix, list[int]]:
    """Canonical RREF, padded with zero rows to the original shape."""
    red, pivots = rref_rows(m.rows, m.cols)
    return F2Matrix(red + [0] * (m.nrows - len(red)), m.cols), pivots


def rank(m: F2Matrix) -> int:
    return rank_rows(m.rows, m.cols)


def kernel_rows(rows: Sequence[int], cols: int) -> list[int]:
    red, pivots = rref_rows(rows, cols)
    pivset = set(pivots)
    out = []
    for f in range(cols):
        if f in pivset:
            continue
        v = 1 << f
        for r, p in zip(red, pivots):
            if (r >> f) & 1:
                v |= 1 << p
        out.append(v)
    return out


def kernel_basis(m: F2Matrix) -> list[F2Vector]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    return [F2Vector(m.cols, v) for v in kernel_rows(m.rows, m.cols)]


def solve_rows(rows: Sequence[int], cols: int, b: int) -> int | None:
    aug = [r | (((b >> i) & 1) << cols) for i, r in enumerate(rows)]
    red, pivots = rref_rows(aug, cols + 1)
    if pivots and pivots[-1] == cols:
        return None
    x = 0
    for r, p in zip(red, pivots):
        if (r >> cols) & 1:
            x |= 1 << p
    return x


def solve(m: F2Matrix, b: F2Vector) -> F2Vector | None:
    """Some ``x`` with ``m x = b``, or ``None`` when the system is inconsistent."""
    if b.length != m.nrows:
        raise ValueError(f"right-hand side has length {b.length}, expected {m.nrows}")
    x = solve_rows(m.rows, m.cols, b.bits)
    return None if x is None else F2Vector(m.cols, x)


class EchelonBasis:
    """Incrementally grown, fully reduced echelon basis.

    Pivots are lowest set bits.  With ``track=True`` every stored row
    remembers which inserted vectors it combines (as a bitmask over
    insertion order), which yields coordinates and linear dependencies.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[int, int] = {}
        self.tags: dict[int, int] = {}
        self.count = 0  # vectors offered so far
        self.pivmask = 0

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, v: int) -> tuple[int, int]:
        """Return ``(residual, tag)``: ``v = residual + sum(tagged inputs)``."""
        tag = 0
        m = v & self.pivmask
        while m:
            low = m & -m
            p = low.bit_length() - 1
            v ^= self.pivots[p]
            if self.track:
                tag ^= self.tags[p]
            m ^= low
        return v, tag

    def contains(self, v: int) -> bool:
        return self.reduce(v)[0] == 0

    def add(self, v: int) -> tuple[bool, int]:
        """Offer ``v``.  Returns ``(independent, dependency_tag)``.

        When ``v`` is dependent, the tag (including ``v``'s own bit) is a
        relation among offered vectors.
        """
        idx = self.count
        self.count += 1
        res, tag = self.reduce(v)
        if self.track:
            tag ^= 1 << idx
        if res == 0:
            return False, tag
        low = res & -res
        p = low.bit_length() - 1
        # keep the basis fully reduced: clear the new pivot from older rows
        for q, row in self.pivots.items():
            if row & low:
                self.pivots[q] = row ^ res
                if self.track:
                    self.tags[q] ^= tag
        self.pivots[p] = res
        self.tags[p] = tag
        self.pivmask |= low
        return True, tag

    def rows(self) -> list[int]:
        return [self.pivots[p] for p in sorted(self.pivots)]
