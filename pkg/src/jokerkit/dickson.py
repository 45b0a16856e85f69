"""Polynomial rings over GF(2) with Steenrod squares, and Dickson invariants.

``F_2[t_1..t_n]`` with ``|t_i| = 1``; the total square is the ring map
``t_i -> t_i + t_i^2``.  The Dickson invariants ``x_(2^n - 2^i)`` are the
coefficients of ``prod_v (X + v)`` over all linear forms ``v``, and their
reduced cohomology through a degree bound becomes a :class:`FiniteModule`.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable, Sequence

from jokerkit.f2core import EchelonBasis, F2Matrix
from jokerkit.fpmodule import (
    FiniteModule,
    double,
    find_isomorphism,
    joker,
    quotient_by_subspace,
    suspend,
)
from jokerkit.steenrod import FULL

_BITS = 8  # bits per packed exponent; degrees stay far below 256
_MASK = (1 << _BITS) - 1


def _pack(exps: Sequence[int]) -> int:
    out = 0
    for i, e in enumerate(exps):
        if not 0 <= e <= _MASK:
            raise ValueError(f"exponent {e} out of range")
        out |= e << (_BITS * i)
    return out


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


class NotInSubalgebraError(ValueError):
    pass


class Polynomial:
    """Element of ``F_2[t_1..t_n]``: a set of monomials (packed exponents)."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Iterable[int] = ()):
        self.nvars = nvars
        self.terms = frozenset(terms)

    @classmethod
    def from_exponents(cls, nvars: int, monomials: Iterable[Sequence[int]]) -> "Polynomial":
        acc: set = set()
        for m in monomials:
            if len(m) != nvars:
                raise ValueError("wrong number of exponents")
            acc ^= {_pack(m)}
        return cls(nvars, acc)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        return cls(nvars, (1 << (_BITS * i),))

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls(nvars, (0,))

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted((_unpack(k, self.nvars) for k in self.terms), reverse=True)

    def _degree_of(self, key: int) -> int:
        return sum(_unpack(key, self.nvars))

    def degrees(self) -> set[int]:
        return {self._degree_of(k) for k in self.terms}

    @property
    def degree(self) -> int | None:
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def component(self, d: int) -> "Polynomial":
        return Polynomial(self.nvars, (k for k in self.terms if self._degree_of(k) == d))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, self.terms))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.nvars, self.terms ^ other.terms)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        acc: set = set()
        for a in self.terms:
            for b in other.terms:
                acc ^= {a + b}
        return Polynomial(self.nvars, acc)

    def __pow__(self, e: int) -> "Polynomial":
        out = Polynomial.one(self.nvars)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base.square()
        return out

    def square(self) -> "Polynomial":
        return Polynomial(self.nvars, (2 * k for k in self.terms))

    def substitute(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Ring map sending ``t_i`` to ``images[i]``."""
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            if key not in powers:
                powers[key] = images[i] ** e
            return powers[key]

        out: set = set()
        for key in self.terms:
            term = Polynomial.one(images[0].nvars if images else self.nvars)
            for i, e in enumerate(_unpack(key, self.nvars)):
                if e:
                    term = term * power(i, e)
            out ^= term.terms
        return Polynomial(images[0].nvars if images else self.nvars, out)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in self.monomials():
            factors = [f"t{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e]
            parts.append("*".join(factors) if factors else "1")
        return " + ".join(parts)

    __repr__ = __str__


def total_square(p: Polynomial) -> list[Polynomial]:
    """Components ``[Sq^0 p, Sq^1 p, ..., Sq^deg(p) p]`` of a homogeneous ``p``.

    Uses ``Sq(t^e) = prod_i (t_i + t_i^2)^(e_i)``, i.e. the sum of
    ``t^(e + j)`` over ``j`` bitwise below ``e``.
    """
    d = p.degree
    if d is None:
        return [p]
    comps: list[set] = [set() for _ in range(d + 1)]
    n = p.nvars
    for key in p.terms:
        exps = _unpack(key, n)
        choices = []
        for i, e in enumerate(exps):
            subs = []
            j = e
            while True:  # all j <= e with j & e == j
                subs.append(j)
                if j == 0:
                    break
                j = (j - 1) & e
            choices.append([(j << (_BITS * i), j) for j in subs])
        for combo in iproduct(*choices):
            shift = sum(c[0] for c in combo)
            k = sum(c[1] for c in combo)
            comps[k] ^= {key + shift}
    return [Polynomial(n, c) for c in comps]


def steenrod_square(i: int, p: Polynomial) -> Polynomial:
    comps = total_square(p)
    return comps[i] if 0 <= i < len(comps) else Polynomial.zero(p.nvars)


# --------------------------------------------------------------------------
# Dickson invariants


class DicksonPresentation:
    """The generators ``x_(2^n - 2^i)``, ``0 <= i < n``, in increasing degree."""

    def __init__(self, n: int, generators: dict[int, Polynomial]):
        self.n = n
        self.generators = dict(sorted(generators.items()))

    @property
    def degrees(self) -> list[int]:
        return list(self.generators)

    def generator(self, degree: int) -> Polynomial:
        return self.generators[degree]

    def monomial_degree(self, a: Sequence[int]) -> int:
        return sum(e * d for e, d in zip(a, self.degrees))

    def monomials_of_degree(self, d: int) -> list[tuple[int, ...]]:
        """Exponent vectors over the generators with total degree ``d``."""
        degs = self.degrees
        out: list[tuple[int, ...]] = []

        def rec(i: int, remaining: int, acc: list[int]):
            if i == len(degs):
                if remaining == 0:
                    out.append(tuple(acc))
                return
            for e in range(remaining // degs[i], -1, -1):
                rec(i + 1, remaining - e * degs[i], acc + [e])

        rec(0, d, [])
        return out

    def monomial_name(self, a: Sequence[int]) -> str:
        parts = []
        for e, d in zip(a, self.degrees):
            if e:
                parts.append(f"x{d}" + (f"^{e}" if e > 1 else ""))
        return "".join(parts) if parts else "1"

    def evaluate(self, a: Sequence[int]) -> Polynomial:
        return _evaluate_monomial(self.n, tuple(a))


MAX_RANK = 4


def _linear_forms(n: int) -> list[Polynomial]:
    forms = []
    for mask in range(1 << n):
        forms.append(Polynomial(n, (1 << (_BITS * i) for i in range(n) if (mask >> i) & 1)))
    return forms


def _linearized_product(n: int, constants: Sequence[Polynomial]) -> dict[int, Polynomial]:
    """Coefficients of ``prod_c (X + c)`` as a dict ``power -> coefficient``."""
    coeffs: list[Polynomial] = [Polynomial.one(n)]
    for c in constants:
        new = [Polynomial.zero(n) for _ in range(len(coeffs) + 1)]
        for p, a in enumerate(coeffs):
            new[p + 1] = new[p + 1] + a
            new[p] = new[p] + a * c
        coeffs = new
    return {p: a for p, a in enumerate(coeffs) if a}


def _check_rank(n: int) -> None:
    if not 1 <= n <= MAX_RANK:
        raise ValueError(f"Dickson rank must be between 1 and {MAX_RANK}, got {n}")


@lru_cache(maxsize=None)
def dickson_generators(n: int) -> DicksonPresentation:
    _check_rank(n)
    coeffs = _linearized_product(n, _linear_forms(n))
    gens = {}
    for i in range(n):
        gens[(1 << n) - (1 << i)] = coeffs[1 << i]
    if coeffs.get(1 << n) != Polynomial.one(n):
        raise AssertionError("leading coefficient must be 1")
    return DicksonPresentation(n, gens)


@lru_cache(maxsize=None)
def _evaluate_monomial(n: int, a: tuple[int, ...]) -> Polynomial:
    pres = dickson_generators(n)
    if not any(a):
        return Polynomial.one(n)
    # peel one factor off the last nonzero exponent so prefixes are cached
    i = max(j for j, e in enumerate(a) if e)
    rest = list(a)
    rest[i] -= 1
    return _evaluate_monomial(n, tuple(rest)) * pres.generator(pres.degrees[i])


@lru_cache(maxsize=None)
def _degree_echelon(n: int, d: int):
    pres = dickson_generators(n)
    monos = pres.monomials_of_degree(d)
    index: dict[int, int] = {}
    ech = EchelonBasis(track=True)
    for a in monos:
        ech.add(_to_bits(pres.evaluate(a), index))
    return monos, index, ech


def _to_bits(p: Polynomial, index: dict[int, int], grow: bool = True) -> int:
    v = 0
    for key in p.terms:
        j = index.get(key)
        if j is None:
            if not grow:
                return -1
            j = index[key] = len(index)
        v |= 1 << j
    return v


def express_in_generators(p: Polynomial, pres: DicksonPresentation) -> frozenset:
    """Write ``p`` as a polynomial in the generators.

    Returns a set of generator exponent vectors.  Raises
    :class:`NotInSubalgebraError` when ``p`` is not a Dickson invariant.
    """
    if not p:
        return frozenset()
    if p.nvars != pres.n:
        raise ValueError("variable count mismatch")
    d = p.degree
    monos, index, ech = _degree_echelon(pres.n, d)
    v = _to_bits(p, index, grow=False)
    if v < 0:
        raise NotInSubalgebraError("not invariant: monomial outside the span of generator products")
    residual, tag = ech.reduce(v)
    if residual:
        raise NotInSubalgebraError(f"not in the Dickson subalgebra: {p}")
    return frozenset(monos[j] for j in range(len(monos)) if (tag >> j) & 1)


def generator_expression_name(expr: frozenset, pres: DicksonPresentation) -> str:
    if not expr:
        return "0"
    return " + ".join(pres.monomial_name(a) for a in sorted(expr, reverse=True))


@lru_cache(maxsize=None)
def generator_total_squares(n: int) -> dict[int, list[frozenset]]:
    """``Sq^j x_m`` in generator form for each Dickson generator ``x_m``.

    Substituting ``t -> t + t^2`` into ``prod_v (X + v)`` gives
    ``prod_v (X + v + v^2)``, whose ``X^(2^i)`` coefficient is the total
    square of ``x_(2^n - 2^i)``.
    """
    pres = dickson_generators(n)
    shifted = [v + v.square() for v in _linear_forms(n)]
    coeffs = _linearized_product(n, shifted)
    out = {}
    for i in range(n):
        m = (1 << n) - (1 << i)
        total = coeffs[1 << i]
        out[m] = [express_in_generators(total.component(m + j), pres) for j in range(m + 1)]
    return out


def _gen_mul(p: frozenset, q: frozenset) -> frozenset:
    acc: set = set()
    for a in p:
        for b in q:
            acc ^= {tuple(x + y for x, y in zip(a, b))}
    return frozenset(acc)


def monomial_total_square(n: int, a: Sequence[int], bound: int) -> dict[int, frozenset]:
    """Components ``Sq^j(x^a)`` in generator form, for ``deg + j <= bound``.

    Cartan formula over the generator factors.
    """
    pres = dickson_generators(n)
    squares = generator_total_squares(n)
    base = pres.monomial_degree(a)
    unit = tuple(0 for _ in a)
    acc: dict[int, frozenset] = {0: frozenset((unit,))}
    deg = 0
    for idx, e in enumerate(a):
        m = pres.degrees[idx]
        for _ in range(e):
            new: dict[int, set] = {}
            for j1, p in acc.items():
                for j2, q in enumerate(squares[m]):
                    if not q or deg + m + j1 + j2 > bound:
                        continue
                    new.setdefault(j1 + j2, set())
                    new[j1 + j2] ^= _gen_mul(p, q)
            acc = {j: frozenset(s) for j, s in new.items() if s}
            deg += m
    assert deg == base
    return acc


def ladder_holds(n: int) -> bool:
    """``Sq^(2^i) x_(2^n - 2^(i+1)) = x_(2^n - 2^i)`` for ``0 <= i <= n - 2``."""
    pres = dickson_generators(n)
    for i in range(n - 1):
        src = (1 << n) - (1 << (i + 1))
        tgt = (1 << n) - (1 << i)
        img = steenrod_square(1 << i, pres.generator(src))
        if img != pres.generator(tgt):
            return False
    return True


def gl_generators(n: int) -> list[list[Polynomial]]:
    """Images of ``t_1..t_n`` under generators of ``GL_n(F_2)``: adjacent
    transpositions and the transvection ``t_1 -> t_1 + t_2``."""
    ts = [Polynomial.variable(n, i) for i in range(n)]
    gens = []
    for i in range(n - 1):
        img = list(ts)
        img[i], img[i + 1] = ts[i + 1], ts[i]
        gens.append(img)
    if n >= 2:
        img = list(ts)
        img[0] = ts[0] + ts[1]
        gens.append(img)
    return gens


def is_invariant(p: Polynomial) -> bool:
    return all(p.substitute(g) == p for g in gl_generators(p.nvars))


# --------------------------------------------------------------------------
# modules


def skeleton_module(n: int, bound: int) -> FiniteModule:
    """Reduced ``DI(n)`` in degrees ``1 .. bound`` as a module over ``A``.

    The basis in each degree is the generator monomials, largest exponent
    vector first; classes are named like ``x4x7`` or ``x2^3``.
    """
    _check_rank(n)
    pres = dickson_generators(n)
    basis: dict[int, list[tuple[int, ...]]] = {}
    for d in range(1, bound + 1):
        monos = pres.monomials_of_degree(d)
        if monos:
            basis[d] = monos
    position = {a: (d, i) for d, monos in basis.items() for i, a in enumerate(monos)}
    columns: dict[tuple[int, int], list[int]] = {}
    for d, monos in basis.items():
        for i, a in enumerate(monos):
            comps = monomial_total_square(n, a, bound)
            for j, expr in comps.items():
                if j == 0 or j & (j - 1):
                    continue
                k = j.bit_length() - 1
                col = columns.setdefault((k, d), [0] * len(monos))
                for b in expr:
                    col[i] ^= 1 << position[b][1]
    dims = {d: len(m) for d, m in basis.items()}
    actions = {
        (k, d): F2Matrix.from_columns(cols, dims.get(d + (1 << k), 0))
        for (k, d), cols in columns.items()
        if any(cols)
    }
    names = {d: tuple(pres.monomial_name(a) for a in monos) for d, monos in basis.items()}
    return FiniteModule(FULL, dims, actions, names)


JOKER_QUOTIENT_CLASSES = {
    0: ("x2^3",),
    1: ("x7", "x4x7", "x4^3"),
    2: ("x14", "x15", "x8x14", "x8x15", "x8^3"),
}


def joker_quotient(k: int):
    """Quotient of a Dickson skeleton isomorphic to ``suspend(double(J, k), 2^(k+1))``.

    Returns ``(module, certificate)`` where the certificate is a degreewise
    isomorphism onto the suspended double of the Joker.
    """
    if k not in JOKER_QUOTIENT_CLASSES:
        raise ValueError("k must be 0, 1 or 2")
    skel = skeleton_module(k + 2, 6 << k)
    quotient = quotient_by_subspace(skel, JOKER_QUOTIENT_CLASSES[k])
    target = suspend(double(joker(), k), 2 << k)
    cert = find_isomorphism(quotient, target)
    return quotient, cert


def build_Y_module(bound: int = 24) -> FiniteModule:
    """Reduced ``DI(4)`` through degree 24 modulo ``x8^3``."""
    if bound != 24:
        raise ValueError("only bound 24 is supported")
    return quotient_by_subspace(skeleton_module(4, bound), ["x8^3"])
