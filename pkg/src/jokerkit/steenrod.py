"""The mod-2 Steenrod algebra in the admissible basis.

Elements are homogeneous GF(2)-sums of admissible words; a word
``(i1, ..., ik)`` stands for ``Sq^i1 ... Sq^ik``.  Sub-Hopf algebras
``A(n)`` are handled through :class:`AlgebraTables`, which builds a basis
of generator words by closing ``{Sq^(2^s)}`` under left multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from jokerkit.f2core import EchelonBasis

Word = tuple[int, ...]


def binom2(n: int, k: int) -> int:
    """``binom(n, k) mod 2`` via Lucas: odd iff the bits of k are a subset of n."""
    if n < 0 or k < 0 or k > n:
        return 0
    return 1 if (n & k) == k else 0


def is_admissible(w: Sequence[int]) -> bool:
    return all(w[j] >= 2 * w[j + 1] for j in range(len(w) - 1))


def adem_relation(a: int, b: int) -> list[Word]:
    """Admissible expansion of ``Sq^a Sq^b`` for ``0 < a < 2b``."""
    if not (0 < a < 2 * b):
        raise ValueError(f"Sq^{a} Sq^{b} is already admissible")
    out = []
    for j in range(a // 2 + 1):
        if binom2(b - 1 - j, a - 2 * j):
            out.append((a + b - j, j) if j else (a + b,))
    return out


def _clean(w: Iterable[int]) -> Word:
    return tuple(i for i in w if i)


@lru_cache(maxsize=None)
def _normalize(w: Word) -> frozenset:
    for j in range(len(w) - 1):
        a, b = w[j], w[j + 1]
        if a < 2 * b:
            acc: set = set()
            for pair in adem_relation(a, b):
                acc ^= _normalize(w[:j] + pair + w[j + 2:])
            return frozenset(acc)
    return frozenset((w,))


@dataclass(frozen=True)
class SteenrodElement:
    terms: frozenset
    degree: int

    @classmethod
    def zero(cls, degree: int) -> "SteenrodElement":
        return cls(frozenset(), degree)

    @classmethod
    def one(cls) -> "SteenrodElement":
        return cls(frozenset(((),)), 0)

    @classmethod
    def sq(cls, *exponents: int) -> "SteenrodElement":
        """``Sq(a, b, ...)`` is the admissible expansion of ``Sq^a Sq^b ...``."""
        return adem_normalize(exponents)

    def __add__(self, other: "SteenrodElement") -> "SteenrodElement":
        if not self.terms:
            return other
        if not other.terms:
            return self
        if self.degree != other.degree:
            raise ValueError("sum of elements of different degrees")
        return SteenrodElement(self.terms ^ other.terms, self.degree)

    __sub__ = __add__

    def __mul__(self, other: "SteenrodElement") -> "SteenrodElement":
        return multiply(self, other)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def words(self) -> list[Word]:
        return sorted(self.terms, reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(word_name(w) for w in self.words())

    __repr__ = __str__


def word_name(w: Sequence[int]) -> str:
    return "".join(f"Sq{i}" for i in w) if len(w) else "1"


def adem_normalize(w: Sequence[int]) -> SteenrodElement:
    w = _clean(w)
    return SteenrodElement(_normalize(w), sum(w))


def multiply(a: SteenrodElement, b: SteenrodElement) -> SteenrodElement:
    acc: set = set()
    for u in a.terms:
        for v in b.terms:
            acc ^= _normalize(u + v)
    return SteenrodElement(frozenset(acc), a.degree + b.degree)


@lru_cache(maxsize=None)
def _chi_sq(n: int) -> frozenset:
    # sum_{i+j=n} Sq^i chi(Sq^j) = 0 for n > 0
    if n == 0:
        return frozenset(((),))
    acc: set = set()
    for i in range(1, n + 1):
        for w in _chi_sq(n - i):
            acc ^= _normalize((i,) + w)
    return frozenset(acc)


@lru_cache(maxsize=None)
def _chi_word(w: Word) -> frozenset:
    if not w:
        return frozenset(((),))
    if len(w) == 1:
        return _chi_sq(w[0])
    # anti-homomorphism: chi(Sq^a . rest) = chi(rest) chi(Sq^a)
    acc: set = set()
    for u in _chi_word(w[1:]):
        for v in _chi_sq(w[0]):
            acc ^= _normalize(u + v)
    return frozenset(acc)


def antipode(x: SteenrodElement) -> SteenrodElement:
    acc: set = set()
    for w in x.terms:
        acc ^= _chi_word(w)
    return SteenrodElement(frozenset(acc), x.degree)


@lru_cache(maxsize=None)
def _admissible_words(degree: int, max_first: int) -> tuple:
    if degree == 0:
        return ((),)
    out = []
    for first in range(min(degree, max_first), 0, -1):
        for rest in _admissible_words(degree - first, first // 2):
            out.append((first,) + rest)
    return tuple(out)


def admissible_basis(degree: int) -> list[Word]:
    """Admissible words of ``degree`` in descending lexicographic order."""
    if degree < 0:
        return []
    return sorted(_admissible_words(degree, degree), reverse=True)


@lru_cache(maxsize=None)
def _admissible_index(degree: int) -> dict:
    return {w: j for j, w in enumerate(admissible_basis(degree))}


def coordinates(x: SteenrodElement) -> int:
    """Bitmask of ``x`` over :func:`admissible_basis` of its degree."""
    index = _admissible_index(x.degree)
    bits = 0
    for w in x.terms:
        bits |= 1 << index[w]
    return bits


def from_coordinates(degree: int, bits: int) -> SteenrodElement:
    basis = admissible_basis(degree)
    terms = []
    while bits:
        low = bits & -bits
        terms.append(basis[low.bit_length() - 1])
        bits ^= low
    return SteenrodElement(frozenset(terms), degree)


# --------------------------------------------------------------------------
# sub-Hopf algebras


@dataclass(frozen=True)
class SubalgebraSpec:
    """``A(level)`` for an integer level, or the whole algebra when ``None``."""

    level: int | None = None

    def __post_init__(self):
        if self.level is not None and self.level < 0:
            raise ValueError("level must be nonnegative")

    @property
    def is_full(self) -> bool:
        return self.level is None

    def has_generator(self, k: int) -> bool:
        return self.level is None or k <= self.level

    def generator_exponents(self, max_degree: int) -> list[int]:
        """Exponents ``k`` with ``Sq^(2^k)`` in the algebra and ``2^k <= max_degree``."""
        out = []
        k = 0
        while (1 << k) <= max_degree and self.has_generator(k):
            out.append(k)
            k += 1
        return out

    def contains(self, other: "SubalgebraSpec") -> bool:
        if self.level is None:
            return True
        return other.level is not None and other.level <= self.level

    def __str__(self) -> str:
        return "A" if self.level is None else f"A({self.level})"

    @classmethod
    def parse(cls, text: str) -> "SubalgebraSpec":
        text = text.strip()
        if text in ("A", "full"):
            return cls(None)
        if text.startswith("A(") and text.endswith(")"):
            return cls(int(text[2:-1]))
        raise ValueError(f"unknown algebra {text!r}; expected 'A' or 'A(n)'")


FULL = SubalgebraSpec(None)


def A(n: int | None = None) -> SubalgebraSpec:
    return SubalgebraSpec(n)


class AlgebraTables:
    """Degreewise basis and multiplication for ``A`` or ``A(n)``.

    Each basis element is a word in the generators ``Sq^(2^k)`` (stored as
    the tuple of generator degrees), chosen greedily from the candidates
    ``Sq^(2^k) * b`` with ``b`` running over the basis one step down.  The
    admissible expansion of every basis word is kept so that arbitrary
    elements can be expressed in this basis.
    """

    def __init__(self, spec: SubalgebraSpec, generator_order: Sequence[int] | None = None):
        self.spec = spec
        self._order = None if generator_order is None else list(generator_order)
        self._words: list[list[Word]] = [[()]]
        self._coords: list[list[int]] = [[coordinates(SteenrodElement.one())]]
        self._echelons: list[EchelonBasis] = []
        ech = EchelonBasis(track=True)
        ech.add(self._coords[0][0])
        self._echelons.append(ech)
        self._index: list[dict] = [{(): 0}]
        self._mult: dict = {}
        self._zero_run = 0
        self.top_degree: int | None = 0 if spec.level is not None else None

    def _exponents(self, d: int) -> list[int]:
        ks = self.spec.generator_exponents(d)
        if self._order is not None:
            ks = [k for k in self._order if k in ks]
        return ks

    def _extend(self, d: int) -> None:
        while len(self._words) <= d:
            e = len(self._words)
            ech = EchelonBasis(track=True)
            words: list[Word] = []
            coords: list[int] = []
            target = len(admissible_basis(e)) if self.spec.is_full else None
            for k in self._exponents(e):
                g = 1 << k
                lower = e - g
                for w, c in zip(self._words[lower], self._coords[lower]):
                    if target is not None and len(words) == target:
                        break
                    x = multiply(SteenrodElement.sq(g), from_coordinates(lower, c))
                    cx = coordinates(x)
                    # only independent vectors are offered so that tags index words
                    if ech.reduce(cx)[0]:
                        ech.add(cx)
                        words.append((g,) + w)
                        coords.append(cx)
            self._words.append(words)
            self._coords.append(coords)
            self._echelons.append(ech)
            self._index.append({w: j for j, w in enumerate(words)})
            if self.spec.level is not None:
                if words:
                    self.top_degree = e
                    self._zero_run = 0
                else:
                    self._zero_run += 1

    def finished(self) -> bool:
        """True once the (finite) algebra is known to vanish above ``top_degree``."""
        if self.spec.level is None:
            return False
        return self._zero_run >= (1 << self.spec.level)

    def complete(self) -> None:
        if self.spec.level is None:
            raise ValueError("the full Steenrod algebra is infinite")
        while not self.finished():
            self._extend(len(self._words))

    def words(self, d: int) -> list[Word]:
        if d < 0:
            return []
        if self.finished() and d > self.top_degree:
            return []
        self._extend(d)
        return self._words[d]

    def dim(self, d: int) -> int:
        return len(self.words(d))

    def element(self, d: int, i: int) -> SteenrodElement:
        self._extend(d)
        return from_coordinates(d, self._coords[d][i])

    def elements(self, d: int) -> list[SteenrodElement]:
        return [self.element(d, i) for i in range(self.dim(d))]

    def index_of(self, word: Word) -> int | None:
        d = sum(word)
        self.words(d)
        if d >= len(self._index):
            return None
        return self._index[d].get(tuple(word))

    def express(self, x: SteenrodElement) -> int:
        """Coordinates of ``x`` over :meth:`words` of its degree."""
        if not x:
            return 0
        d = x.degree
        if self.dim(d) == 0:
            raise ValueError(f"{x} is not in {self.spec}")
        res, tag = self._echelons[d].reduce(coordinates(x))
        if res:
            raise ValueError(f"{x} is not in {self.spec}")
        return tag

    def product(self, d1: int, i: int, d2: int, j: int) -> int:
        """Coordinates of ``basis(d1)[i] * basis(d2)[j]`` in degree ``d1 + d2``."""
        key = (d1, i, d2, j)
        out = self._mult.get(key)
        if out is None:
            out = self.express(multiply(self.element(d1, i), self.element(d2, j)))
            self._mult[key] = out
        return out

    def indecomposable_index(self, k: int) -> int:
        """Basis position of the word ``Sq^(2^k)``; every other basis word in
        that degree is decomposable."""
        idx = self.index_of((1 << k,))
        if idx is None:
            raise ValueError(f"Sq^{1 << k} is not a basis word of {self.spec}")
        return idx

    def total_dimension(self) -> int:
        self.complete()
        return sum(len(w) for w in self._words)


_TABLES: dict = {}


def algebra_tables(spec: SubalgebraSpec) -> AlgebraTables:
    t = _TABLES.get(spec)
    if t is None:
        t = _TABLES[spec] = AlgebraTables(spec)
    return t


def algebra_basis(spec: SubalgebraSpec, degree: int) -> list[SteenrodElement]:
    """Basis of the degree-``degree`` part of ``spec``.

    For the full algebra this is the admissible basis; for ``A(n)`` it is
    the reduced row-echelon basis of the span computed by closure.
    """
    if degree < 0:
        return []
    if spec.is_full:
        return [SteenrodElement(frozenset((w,)), degree) for w in admissible_basis(degree)]
    t = algebra_tables(spec)
    return [from_coordinates(degree, c) for c in t._echelons[degree].rows()] if t.dim(degree) else []
