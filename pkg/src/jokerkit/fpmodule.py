"""Finite graded modules over the Steenrod algebra or one of its ``A(n)``.

A module stores, for each generator ``Sq^(2^k)`` and each degree ``d``, the
matrix of that generator from the degree-``d`` basis to the degree
``d + 2^k`` basis.  Every other operation is derived by composing these
along the generator-word basis of :class:`~jokerkit.steenrod.AlgebraTables`,
and construction checks that this derived action is multiplicative.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from jokerkit.f2core import EchelonBasis, F2Matrix, kernel_rows, rank_rows
from jokerkit.steenrod import (
    FULL,
    SteenrodElement,
    SubalgebraSpec,
    admissible_basis,
    algebra_tables,
    antipode,
    coordinates,
    multiply,
    word_name,
)


class ModuleStructureError(ValueError):
    """Action matrices that do not define a module over the algebra."""


class NotADirectSumError(ValueError):
    pass


class NotASubmoduleError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ExtensionError(ValueError):
    pass


class ModuleFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class FiniteModule:
    """Finite graded left module, immutable after construction.

    ``dims`` maps degree to dimension, ``actions`` maps ``(k, d)`` to the
    matrix of ``Sq^(2^k)`` on degree ``d``.  Missing entries are zero.
    """

    def __init__(
        self,
        algebra: SubalgebraSpec,
        dims: dict[int, int],
        actions: dict[tuple[int, int], F2Matrix] | None = None,
        names: dict[int, Sequence[str]] | None = None,
        validate: bool = True,
    ):
        self.algebra = algebra
        self.dims = {d: n for d, n in sorted(dims.items()) if n > 0}
        self.actions: dict[tuple[int, int], F2Matrix] = {}
        for (k, d), mat in (actions or {}).items():
            if not algebra.has_generator(k):
                raise ModuleStructureError(f"Sq^{1 << k} is not a generator of {algebra}")
            if mat.is_zero():
                continue
            expected = (self.dim(d + (1 << k)), self.dim(d))
            if mat.shape != expected:
                raise ModuleStructureError(f"Sq^{1 << k} on degree {d}: shape {mat.shape}, expected {expected}")
            self.actions[(k, d)] = mat
        self.names = {}
        for d, n in self.dims.items():
            given = (names or {}).get(d)
            self.names[d] = tuple(given) if given is not None else tuple(f"e{d}_{i}" for i in range(n))
            if len(self.names[d]) != n:
                raise ModuleStructureError(f"degree {d}: {len(self.names[d])} names for dimension {n}")
        self._basis_cache: dict = {}
        if validate:
            self.validate()

    # basic shape ---------------------------------------------------------
    def dim(self, d: int) -> int:
        return self.dims.get(d, 0)

    @property
    def degrees(self) -> list[int]:
        return list(self.dims)

    @property
    def lo(self) -> int | None:
        return min(self.dims) if self.dims else None

    @property
    def hi(self) -> int | None:
        return max(self.dims) if self.dims else None

    @property
    def width(self) -> int:
        return self.hi - self.lo if self.dims else 0

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return not self.dims

    def generator_exponents(self) -> list[int]:
        return self.algebra.generator_exponents(self.width)

    def gen(self, k: int, d: int) -> F2Matrix:
        mat = self.actions.get((k, d))
        if mat is None:
            return F2Matrix.zeros(self.dim(d + (1 << k)), self.dim(d))
        return mat

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteModule):
            return NotImplemented
        return self.algebra == other.algebra and self.dims == other.dims and self.actions == other.actions

    def __hash__(self):
        return hash((self.algebra, tuple(self.dims.items()), tuple(sorted(self.actions.items()))))

    def __repr__(self) -> str:
        dims = ", ".join(f"{d}:{n}" for d, n in self.dims.items())
        return f"FiniteModule({self.algebra}; {dims})"

    def class_index(self, name: str) -> tuple[int, int]:
        for d, names in self.names.items():
            if name in names:
                return d, names.index(name)
        raise KeyError(name)

    # derived action -------------------------------------------------------
    @property
    def tables(self):
        return algebra_tables(self.algebra)

    def basis_action(self, e: int, i: int, d: int) -> F2Matrix:
        """Matrix of the ``i``-th basis word of degree ``e`` from degree ``d``."""
        key = (e, i, d)
        mat = self._basis_cache.get(key)
        if mat is not None:
            return mat
        if e == 0:
            mat = F2Matrix.identity(self.dim(d))
        elif self.dim(d) == 0 or self.dim(d + e) == 0:
            mat = F2Matrix.zeros(self.dim(d + e), self.dim(d))
        else:
            word = self.tables.words(e)[i]
            g, rest = word[0], word[1:]
            j = self.tables.index_of(rest)
            inner = self.basis_action(e - g, j, d)
            mat = self.gen(g.bit_length() - 1, d + e - g) @ inner
        self._basis_cache[key] = mat
        return mat

    def act(self, x: SteenrodElement, d: int) -> F2Matrix:
        """Matrix of ``x`` from degree ``d`` to degree ``d + |x|``."""
        rows, cols = self.dim(d + x.degree), self.dim(d)
        if not x or rows == 0 or cols == 0:
            return F2Matrix.zeros(rows, cols)
        coeffs = self.tables.express(x)
        acc = [0] * rows
        while coeffs:
            low = coeffs & -coeffs
            mat = self.basis_action(x.degree, low.bit_length() - 1, d)
            acc = [a ^ b for a, b in zip(acc, mat.rows)]
            coeffs ^= low
        return F2Matrix(acc, cols)

    def sq(self, i: int, d: int) -> F2Matrix:
        if i == 0:
            return F2Matrix.identity(self.dim(d))
        return self.act(SteenrodElement.sq(i), d)

    def validate(self) -> None:
        """Check that generator actions define a module.

        With basis words ``b`` and generators ``g`` it suffices that
        ``rho(g) rho(b) = rho(g b)`` everywhere, by induction on word length.
        """
        if not self.dims:
            return
        t = self.tables
        width = self.width
        degrees = self.degrees
        for k in self.generator_exponents():
            g = 1 << k
            gi = t.indecomposable_index(k)
            for e in range(0, width - g + 1):
                for i in range(t.dim(e)):
                    prod = t.product(g, gi, e, i)
                    for d in degrees:
                        if d + e + g > self.hi:
                            break
                        lhs = self.gen(k, d + e) @ self.basis_action(e, i, d)
                        rhs_rows = [0] * self.dim(d + e + g)
                        c = prod
                        while c:
                            low = c & -c
                            mat = self.basis_action(e + g, low.bit_length() - 1, d)
                            rhs_rows = [a ^ b for a, b in zip(rhs_rows, mat.rows)]
                            c ^= low
                        if list(lhs.rows) != rhs_rows:
                            word = word_name(t.words(e)[i])
                            raise ModuleStructureError(
                                f"Sq^{g} * {word} acts inconsistently on degree {d}"
                            )

    # text format ---------------------------------------------------------
    def global_index(self) -> dict[tuple[int, int], int]:
        out = {}
        for d, n in self.dims.items():
            for i in range(n):
                out[(d, i)] = len(out)
        return out

    def to_text(self, comment: str | None = None) -> str:
        index = self.global_index()
        lines = []
        if comment:
            lines.extend(f"# {c}" for c in comment.splitlines())
        lines.append(str(self.total_dim))
        lines.append(" ".join(str(d) for d, n in self.dims.items() for _ in range(n)))
        for d, n in self.dims.items():
            for i in range(n):
                for k in self.generator_exponents():
                    mat = self.actions.get((k, d))
                    if mat is None:
                        continue
                    col = mat.columns()[i]
                    targets = [index[(d + (1 << k), r)] for r in range(mat.nrows) if (col >> r) & 1]
                    if targets:
                        lines.append(" ".join(map(str, [index[(d, i)], k, len(targets), *targets])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, algebra: SubalgebraSpec = FULL) -> "FiniteModule":
        content = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                content.append((lineno, line))
        if len(content) < 2 and not (content and content[0][1] == "0"):
            raise ModuleFormatError("expected generator count and degree lines", content[0][0] if content else None)
        try:
            lineno, line = content[0]
            g = int(line)
            if g < 0:
                raise ValueError
        except ValueError:
            raise ModuleFormatError(f"bad generator count {content[0][1]!r}", content[0][0]) from None
        if g == 0:
            return cls(algebra, {})
        lineno, line = content[1]
        try:
            degs = [int(x) for x in line.split()]
        except ValueError:
            raise ModuleFormatError("generator degrees must be integers", lineno) from None
        if len(degs) != g:
            raise ModuleFormatError(f"expected {g} degrees, got {len(degs)}", lineno)
        local: list[tuple[int, int]] = []
        dims: dict[int, int] = {}
        for d in degs:
            local.append((d, dims.get(d, 0)))
            dims[d] = dims.get(d, 0) + 1
        columns: dict[tuple[int, int], list[int]] = {}
        for lineno, line in content[2:]:
            try:
                nums = [int(x) for x in line.split()]
            except ValueError:
                raise ModuleFormatError("action lines must contain integers", lineno) from None
            if len(nums) < 3 or len(nums) != 3 + nums[2]:
                raise ModuleFormatError("expected '<gen> <k> <count> <targets...>'", lineno)
            src, k, _count, *targets = nums
            if not 0 <= src < g:
                raise ModuleFormatError(f"generator index {src} out of range", lineno)
            if k < 0 or not algebra.has_generator(k):
                raise ModuleFormatError(f"Sq^(2^{k}) is not a generator of {algebra}", lineno)
            d, i = local[src]
            col = columns.setdefault((k, d), [0] * dims[d])
            for tgt in targets:
                if not 0 <= tgt < g:
                    raise ModuleFormatError(f"target index {tgt} out of range", lineno)
                td, ti = local[tgt]
                if td != d + (1 << k):
                    raise ModuleFormatError(
                        f"Sq^{1 << k} maps degree {d} to {d + (1 << k)}, target has degree {td}", lineno
                    )
                col[i] ^= 1 << ti
        actions = {
            (k, d): F2Matrix.from_columns(cols, dims.get(d + (1 << k), 0))
            for (k, d), cols in columns.items()
        }
        return cls(algebra, dims, actions)


# --------------------------------------------------------------------------
# small constructions


def trivial_module(degree: int = 0, algebra: SubalgebraSpec = FULL) -> FiniteModule:
    return FiniteModule(algebra, {degree: 1}, names={degree: ("1",)})


def zero_module(algebra: SubalgebraSpec = FULL) -> FiniteModule:
    return FiniteModule(algebra, {})


def direct_sum(m1: FiniteModule, m2: FiniteModule) -> FiniteModule:
    if m1.algebra != m2.algebra:
        raise ValueError("direct sum of modules over different algebras")
    dims = {d: m1.dim(d) + m2.dim(d) for d in set(m1.dims) | set(m2.dims)}
    actions = {}
    for k in set(m1.algebra.generator_exponents(max(m1.width, m2.width))) | {k for k, _ in m1.actions} | {
        k for k, _ in m2.actions
    }:
        for d in dims:
            a, b = m1.gen(k, d), m2.gen(k, d)
            if a.is_zero() and b.is_zero():
                continue
            shift_c, shift_r = m1.dim(d), m1.dim(d + (1 << k))
            rows = list(a.rows) + [r << shift_c for r in b.rows]
            actions[(k, d)] = F2Matrix(rows, dims[d])
    names = {d: m1.names.get(d, ()) + m2.names.get(d, ()) for d in dims}
    return FiniteModule(m1.algebra, dims, actions, names)


def suspend(m: FiniteModule, s: int) -> FiniteModule:
    if s == 0:
        return m
    return FiniteModule(
        m.algebra,
        {d + s: n for d, n in m.dims.items()},
        {(k, d + s): mat for (k, d), mat in m.actions.items()},
        {d + s: names for d, names in m.names.items()},
        validate=False,
    )


def restrict(m: FiniteModule, n: int | None) -> FiniteModule:
    """Forget the action of generators ``Sq^(2^k)`` with ``k > n``."""
    target = SubalgebraSpec(n)
    if not m.algebra.contains(target):
        raise ValueError(f"cannot restrict a module over {m.algebra} to {target}")
    if target == m.algebra:
        return m
    actions = {(k, d): mat for (k, d), mat in m.actions.items() if target.has_generator(k)}
    return FiniteModule(target, m.dims, actions, m.names, validate=False)


def double(m: FiniteModule, i: int) -> FiniteModule:
    """Iterated double: degrees scaled by ``2^i``, ``Sq^(2^k)`` acts as the
    old ``Sq^(2^(k-i))`` for ``k >= i`` and as zero below."""
    if i < 0:
        raise ValueError("doubling index must be nonnegative")
    if i == 0:
        return m
    scale = 1 << i
    algebra = m.algebra if m.algebra.is_full else SubalgebraSpec(m.algebra.level + i)
    return FiniteModule(
        algebra,
        {d * scale: n for d, n in m.dims.items()},
        {(k + i, d * scale): mat for (k, d), mat in m.actions.items()},
        {d * scale: names for d, names in m.names.items()},
        validate=False,  # doubling is a ring map on A, so relations carry over
    )


def dual(m: FiniteModule) -> tuple[FiniteModule, int]:
    """Linear dual made a left module through the antipode.

    The dual lives in degrees ``-hi .. -lo``; it is returned suspended by
    ``shift = hi`` so that it starts in degree 0, together with ``shift``.
    """
    if m.is_zero():
        return m, 0
    hi = m.hi
    dims = {hi - d: n for d, n in m.dims.items()}
    actions = {}
    for k in m.generator_exponents():
        g = 1 << k
        chi = antipode(SteenrodElement.sq(g))
        for d in m.degrees:
            if m.dim(d - g) == 0:
                continue
            mat = m.act(chi, d - g)
            if not mat.is_zero():
                actions[(k, hi - d)] = mat.transpose()
    names = {hi - d: tuple(f"{x}*" for x in names) for d, names in m.names.items()}
    return FiniteModule(m.algebra, dims, actions, names), hi


def degree_window(m: FiniteModule, lo: int | None = None, hi: int | None = None) -> FiniteModule:
    """The subquotient concentrated in degrees ``lo .. hi``."""
    keep = {d: n for d, n in m.dims.items() if (lo is None or d >= lo) and (hi is None or d <= hi)}
    actions = {key: mat for key, mat in m.actions.items() if key[1] in keep and key[1] + (1 << key[0]) in keep}
    return FiniteModule(m.algebra, keep, actions, {d: m.names[d] for d in keep}, validate=False)


def split_at(m: FiniteModule, cut: int) -> tuple[FiniteModule, FiniteModule]:
    """Split into degrees ``<= cut`` and ``> cut``; fails unless no
    generator action crosses the cut."""
    for (k, d), mat in sorted(m.actions.items()):
        if d <= cut < d + (1 << k) and not mat.is_zero():
            raise NotADirectSumError(
                f"not a direct sum: Sq^{1 << k} maps degree {d} to degree {d + (1 << k)} across the cut {cut}"
            )
    return degree_window(m, None, cut), degree_window(m, cut + 1, None)


# --------------------------------------------------------------------------
# quotients


def _span_echelons(m: FiniteModule, span: Iterable) -> dict[int, EchelonBasis]:
    ech: dict[int, EchelonBasis] = {}
    for item in span:
        if isinstance(item, str):
            d, i = m.class_index(item)
            v = 1 << i
        else:
            d, v = item
        if v >> m.dim(d):
            raise ValueError(f"vector {v:b} too long for degree {d}")
        ech.setdefault(d, EchelonBasis()).add(v)
    return ech


def _quotient(m: FiniteModule, ech: dict[int, EchelonBasis]) -> FiniteModule:
    survivors: dict[int, list[int]] = {}
    for d, n in m.dims.items():
        piv = ech[d].pivmask if d in ech else 0
        survivors[d] = [i for i in range(n) if not (piv >> i) & 1]

    def compress(d: int, v: int) -> int:
        if d in ech:
            v = ech[d].reduce(v)[0]
        out = 0
        for j, i in enumerate(survivors[d]):
            if (v >> i) & 1:
                out |= 1 << j
        return out

    dims = {d: len(s) for d, s in survivors.items()}
    actions = {}
    for (k, d), mat in m.actions.items():
        d2 = d + (1 << k)
        cols = [compress(d2, mat.apply(1 << i)) for i in survivors[d]]
        actions[(k, d)] = F2Matrix.from_columns(cols, dims.get(d2, 0))
    names = {d: tuple(m.names[d][i] for i in s) for d, s in survivors.items()}
    return FiniteModule(m.algebra, dims, actions, names, validate=False)


def quotient_by_subspace(m: FiniteModule, span: Iterable) -> FiniteModule:
    """Quotient by the span of ``span``, which must already be a submodule.

    Items are class names or ``(degree, packed vector)`` pairs.
    """
    ech = _span_echelons(m, span)
    for d, basis in sorted(ech.items()):
        for v in basis.rows():
            for k in m.generator_exponents():
                image = m.gen(k, d).apply(v)
                if not image:
                    continue
                d2 = d + (1 << k)
                if d2 not in ech or not ech[d2].contains(image):
                    raise NotASubmoduleError(
                        f"not a submodule: Sq^{1 << k} maps degree-{d} vector {v:b} outside the span",
                        witness=(1 << k, d, v),
                    )
    return _quotient(m, ech)


def submodule_generated(m: FiniteModule, span: Iterable) -> dict[int, list[int]]:
    """Degreewise basis of the submodule generated by ``span``."""
    ech = _span_echelons(m, span)
    for d in m.degrees:
        if d not in ech:
            continue
        for v in ech[d].rows():
            for k in m.generator_exponents():
                image = m.gen(k, d).apply(v)
                if image:
                    ech.setdefault(d + (1 << k), EchelonBasis()).add(image)
    return {d: e.rows() for d, e in sorted(ech.items())}


@dataclass(frozen=True)
class ModulePresentation:
    """Cyclic presentation: the generator is killed by ``relations`` (a left
    ideal) and by the two-sided ideals of ``two_sided``."""

    relations: tuple = ()
    bound: int = 0
    two_sided: tuple = field(default=())

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("bound must be nonnegative")


def _ideal_echelon(p: ModulePresentation, d: int) -> EchelonBasis:
    ech = EchelonBasis()
    for r in p.relations:
        if not r or r.degree > d:
            continue
        for w in admissible_basis(d - r.degree):
            ech.add(coordinates(multiply(SteenrodElement(frozenset((w,)), sum(w)), r)))
    for s in p.two_sided:
        if not s or s.degree > d:
            continue
        rest = d - s.degree
        for a in range(rest + 1):
            right = [multiply(s, SteenrodElement(frozenset((v,)), rest - a)) for v in admissible_basis(rest - a)]
            for u in admissible_basis(a):
                left = SteenrodElement(frozenset((u,)), a)
                for sv in right:
                    ech.add(coordinates(multiply(left, sv)))
    return ech


def cyclic_quotient(p: ModulePresentation) -> FiniteModule:
    """``A`` modulo the presented ideal, truncated above ``p.bound``.

    The basis in each degree consists of the lexicographically least
    admissible words that survive reduction modulo the ideal.
    """
    survivors: dict[int, list[int]] = {}
    echs: dict[int, EchelonBasis] = {}
    for d in range(p.bound + 1):
        ech = _ideal_echelon(p, d)
        echs[d] = ech
        n = len(admissible_basis(d))
        # admissible words are listed in descending order, so pivots (lowest
        # bit) absorb the larger words and the smallest ones survive
        survivors[d] = [i for i in range(n) if not (ech.pivmask >> i) & 1]
    dims = {d: len(s) for d, s in survivors.items()}
    actions = {}
    for d in range(p.bound + 1):
        for k in FULL.generator_exponents(p.bound - d):
            g = 1 << k
            d2 = d + g
            if not survivors[d] or not survivors.get(d2):
                continue
            basis = admissible_basis(d)
            cols = []
            for i in survivors[d]:
                x = multiply(SteenrodElement.sq(g), SteenrodElement(frozenset((basis[i],)), d))
                v = echs[d2].reduce(coordinates(x))[0]
                cols.append(sum(1 << j for j, i2 in enumerate(survivors[d2]) if (v >> i2) & 1))
            actions[(k, d)] = F2Matrix.from_columns(cols, dims[d2])
    names = {d: tuple(word_name(admissible_basis(d)[i]) for i in s) for d, s in survivors.items()}
    return FiniteModule(FULL, dims, actions, names)


def joker_presentation(bound: int = 4) -> ModulePresentation:
    two_sided = []
    k = 2
    while (1 << k) <= bound:
        two_sided.append(SteenrodElement.sq(1 << k))
        k += 1
    return ModulePresentation((SteenrodElement.sq(3),), bound, tuple(two_sided))


def question_mark_presentation(bound: int = 3) -> ModulePresentation:
    return ModulePresentation(tuple(SteenrodElement.sq(i) for i in range(2, bound + 1)), bound)


def trivial_presentation(bound: int = 4) -> ModulePresentation:
    return ModulePresentation(tuple(SteenrodElement.sq(i) for i in range(1, bound + 1)), bound)


def joker(bound: int = 4) -> FiniteModule:
    return cyclic_quotient(joker_presentation(bound))


def question_mark(bound: int = 3) -> FiniteModule:
    return cyclic_quotient(question_mark_presentation(bound))


def induced_quotient_module(n: int, bound: int) -> FiniteModule:
    """``A//A(n) = A (x)_{A(n)} F_2`` through degree ``bound``."""
    rel = tuple(SteenrodElement.sq(1 << k) for k in range(n + 1) if (1 << k) <= bound)
    return cyclic_quotient(ModulePresentation(rel, bound))


# --------------------------------------------------------------------------
# instability


def unstable_degree(m: FiniteModule) -> int:
    """Least ``s`` with ``suspend(m, s)`` unstable: the maximum of ``j - d``
    over nonzero ``Sq^j`` acting on degree ``d``."""
    if m.is_zero():
        raise ValueError("the zero module has no unstable degree")
    if not m.algebra.is_full:
        raise ValueError("unstable degree needs a module over the full Steenrod algebra")
    best = None
    for d in m.degrees:
        for j in range(0, m.hi - d + 1):
            if m.dim(d + j) and not m.sq(j, d).is_zero():
                if best is None or j - d > best:
                    best = j - d
    return best


def is_unstable(m: FiniteModule) -> bool:
    """``Sq^i x = 0`` whenever ``i > |x|``; classes in negative degree fail
    already at ``Sq^0``."""
    top = None if m.algebra.is_full else (2 << m.algebra.level) - 1
    for d in m.degrees:
        for j in range(max(d + 1, 0), m.hi - d + 1):
            if top is not None and j > top:
                break
            if m.dim(d + j) and not m.sq(j, d).is_zero():
                return False
    return True


# --------------------------------------------------------------------------
# homomorphisms


def _check_same_algebra(m1: FiniteModule, m2: FiniteModule) -> SubalgebraSpec:
    if m1.algebra != m2.algebra:
        raise ValueError(f"modules over different algebras: {m1.algebra} vs {m2.algebra}")
    return m1.algebra


def hom_space(source: FiniteModule, target: FiniteModule, shift: int = 0) -> list[dict[int, F2Matrix]]:
    """Basis of module maps ``suspend(source, shift) -> target``.

    Each map is a dict from source degree ``d`` to the matrix
    ``source_d -> target_(d + shift)``.
    """
    algebra = _check_same_algebra(source, target)
    blocks: dict[int, tuple[int, int, int]] = {}  # d -> (base, rows, cols)
    n = 0
    for d in source.degrees:
        r, c = target.dim(d + shift), source.dim(d)
        if r:
            blocks[d] = (n, r, c)
            n += r * c
    if source.is_zero() or target.is_zero():
        return []
    span = max(source.hi + shift, target.hi) - min(source.lo + shift, target.lo)
    equations: list[int] = []
    for k in algebra.generator_exponents(span):
        g = 1 << k
        for d in source.degrees:
            d2 = d + g
            S = source.gen(k, d)  # source_d -> source_d2
            T = target.gen(k, d + shift)  # target_(d+shift) -> target_(d2+shift)
            Scols = S.columns()
            for i in range(target.dim(d2 + shift)):
                for j in range(source.dim(d)):
                    eq = 0
                    if d2 in blocks:
                        base, _, cols2 = blocks[d2]
                        col = Scols[j] if Scols else 0
                        while col:
                            low = col & -col
                            c = low.bit_length() - 1
                            eq ^= 1 << (base + i * cols2 + c)
                            col ^= low
                    if d in blocks:
                        base, _, cols1 = blocks[d]
                        row = T.rows[i]
                        while row:
                            low = row & -row
                            c = low.bit_length() - 1
                            eq ^= 1 << (base + c * cols1 + j)
                            row ^= low
                    if eq:
                        equations.append(eq)
    out = []
    for sol in kernel_rows(equations, n):
        fmap = {}
        for d, (base, r, c) in blocks.items():
            rows = [(sol >> (base + i * c)) & ((1 << c) - 1) for i in range(r)]
            fmap[d] = F2Matrix(rows, c)
        out.append(fmap)
    return out


def is_module_map(f: dict[int, F2Matrix], source: FiniteModule, target: FiniteModule, shift: int = 0) -> bool:
    algebra = _check_same_algebra(source, target)
    span = max(source.hi + shift, target.hi) - min(source.lo + shift, target.lo)

    def block(d):
        return f.get(d, F2Matrix.zeros(target.dim(d + shift), source.dim(d)))

    for k in algebra.generator_exponents(span):
        g = 1 << k
        for d in source.degrees:
            if block(d + g) @ source.gen(k, d) != target.gen(k, d + shift) @ block(d):
                return False
    return True


def _invertible(fmap: dict[int, F2Matrix], dims: dict[int, int]) -> bool:
    for d, n in dims.items():
        mat = fmap.get(d)
        if mat is None or rank_rows(mat.rows, mat.cols) != n:
            return False
    return True


def find_isomorphism(m1: FiniteModule, m2: FiniteModule, seed: int = 0, exhaustive_limit: int = 16):
    """An isomorphism ``m1 -> m2`` as a degreewise dict of matrices, or None.

    The intertwining maps form a vector space; an invertible member is
    searched for exhaustively when its dimension is at most
    ``exhaustive_limit`` and by seeded random sampling otherwise.
    """
    _check_same_algebra(m1, m2)
    if m1.dims != m2.dims:
        return None
    if m1.is_zero():
        return {}
    basis = hom_space(m1, m2)
    if not basis:
        return None
    degrees = list(m1.dims)

    def combine(mask: int):
        out = {}
        for d in degrees:
            rows = [0] * m2.dim(d)
            for b, fmap in enumerate(basis):
                if (mask >> b) & 1:
                    rows = [x ^ y for x, y in zip(rows, fmap[d].rows)]
            out[d] = F2Matrix(rows, m1.dim(d))
        return out

    if len(basis) <= exhaustive_limit:
        for mask in range(1, 1 << len(basis)):
            f = combine(mask)
            if _invertible(f, m1.dims):
                return f
        return None
    rng = random.Random(seed)
    for _ in range(4096):
        f = combine(rng.getrandbits(len(basis)))
        if _invertible(f, m1.dims):
            return f
    return None


def is_isomorphic(m1: FiniteModule, m2: FiniteModule) -> bool:
    return find_isomorphism(m1, m2) is not None


def socle(m: FiniteModule, spec: SubalgebraSpec, degree: int) -> list[int]:
    """Basis of the classes in ``degree`` killed by every generator of ``spec``."""
    n = m.dim(degree)
    if n == 0:
        return []
    rows: list[int] = []
    for k in spec.generator_exponents(max(m.hi - degree, 0)):
        if not m.algebra.has_generator(k):
            raise ValueError(f"{m.algebra} module has no Sq^{1 << k} action")
        rows.extend(m.gen(k, degree).rows)
    return kernel_rows(rows, n)


def hom_count(source: FiniteModule, target: FiniteModule, shift: int = 0):
    """Dimension and witness basis of maps ``suspend(source, shift) -> target``."""
    witnesses = hom_space(source, target, shift)
    return len(witnesses), witnesses


# --------------------------------------------------------------------------
# extension by the mod-2 Moore spectrum


def _sym_times_concrete(sym: list[list[int]], mat: F2Matrix) -> list[list[int]]:
    cols = mat.columns()
    out = []
    for row in sym:
        new = []
        for col in cols:
            acc = 0
            while col:
                low = col & -col
                acc ^= row[low.bit_length() - 1]
                col ^= low
            new.append(acc)
        out.append(new)
    return out


def _concrete_times_sym(mat: F2Matrix, sym: list[list[int]], ncols: int) -> list[list[int]]:
    out = []
    for r in mat.rows:
        acc = [0] * ncols
        while r:
            low = r & -r
            src = sym[low.bit_length() - 1]
            acc = [a ^ b for a, b in zip(acc, src)]
            r ^= low
        out.append(acc)
    return out


def _sym_add(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    return [[x ^ y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mod2_extension(m: FiniteModule, prefer: int = 0) -> FiniteModule:
    """Extension ``0 -> suspend(m, 1) -> E -> m -> 0`` with ``Sq^1`` carrying
    each bottom class ``x`` of ``m`` to its copy ``s(x)`` in the submodule.

    The remaining off-diagonal action is solved for from the module
    relations; among all solutions the lexicographically least one is taken
    (``prefer=1`` takes the greatest instead).
    """
    if not m.algebra.is_full:
        raise ValueError("mod2_extension expects a module over the full Steenrod algebra")
    if m.is_zero():
        return m
    lo = m.lo
    width = m.width + 1
    exps = FULL.generator_exponents(width)
    # unknown off-diagonal blocks C[k, d]: m_d -> m_(d + 2^k - 1)
    unknown: dict[tuple[int, int], list[list[int]]] = {}
    n = 0
    const_bit = None  # placed after the unknowns are counted
    fixed: dict[tuple[int, int], bool] = {}
    for k in exps:
        g = 1 << k
        for d in m.degrees:
            r, c = m.dim(d + g - 1), m.dim(d)
            if not r:
                continue
            if k == 0 and d == lo:
                fixed[(k, d)] = True
                continue
            block = []
            for i in range(r):
                block.append([1 << (n + i * c + j) for j in range(c)])
            unknown[(k, d)] = block
            n += r * c
    const_bit = 1 << n
    for (k, d) in fixed:
        c = m.dim(d)
        unknown[(k, d)] = [[const_bit if i == j else 0 for j in range(c)] for i in range(c)]

    def cblock(k: int, d: int) -> list[list[int]]:
        blk = unknown.get((k, d))
        if blk is None:
            return [[0] * m.dim(d) for _ in range(m.dim(d + (1 << k) - 1))]
        return blk

    t = m.tables
    cache: dict = {}

    def c_word(e: int, i: int, d: int) -> list[list[int]]:
        # off-diagonal block of the basis word (e, i) acting on degree d
        key = (e, i, d)
        if key in cache:
            return cache[key]
        if e == 0:
            out = [[0] * m.dim(d) for _ in range(m.dim(d - 1))]
        else:
            word = t.words(e)[i]
            g, rest = word[0], word[1:]
            j = t.index_of(rest)
            k = g.bit_length() - 1
            mid = d + e - g
            p_rest = m.basis_action(e - g, j, d)
            q_g = m.gen(k, mid - 1)
            left = _sym_times_concrete(cblock(k, mid), p_rest)
            right = _concrete_times_sym(q_g, c_word(e - g, j, d), m.dim(d))
            out = _sym_add(left, right)
        cache[key] = out
        return out

    equations: list[int] = []
    for k in exps:
        g = 1 << k
        gi = t.indecomposable_index(k)
        for e in range(0, width - g + 1):
            for i in range(t.dim(e)):
                prod = t.product(g, gi, e, i)
                for d in m.degrees:
                    if d + e + g - 1 > m.hi or not m.dim(d + e + g - 1):
                        continue
                    mid = d + e
                    lhs = _sym_add(
                        _sym_times_concrete(cblock(k, mid), m.basis_action(e, i, d)),
                        _concrete_times_sym(m.gen(k, mid - 1), c_word(e, i, d), m.dim(d)),
                    )
                    rhs = [[0] * m.dim(d) for _ in range(m.dim(d + e + g - 1))]
                    c = prod
                    while c:
                        low = c & -c
                        rhs = _sym_add(rhs, c_word(e + g, low.bit_length() - 1, d))
                        c ^= low
                    for row_l, row_r in zip(lhs, rhs):
                        for a, b in zip(row_l, row_r):
                            if a ^ b:
                                equations.append(a ^ b)
    ech = EchelonBasis()
    for eq in equations:
        ech.add(eq)
        if ech.pivmask & const_bit:
            raise ExtensionError("no consistent extension within the bound")
    for u in range(n):
        trial, _ = ech.reduce((1 << u) | (const_bit if prefer else 0))
        if trial == const_bit:
            ech.add((1 << u) | (0 if prefer else const_bit))
        else:
            ech.add((1 << u) | (const_bit if prefer else 0))
    solution = 0
    for p, row in ech.pivots.items():
        if p < n and row & const_bit:
            solution |= 1 << p

    def evaluate(form: int) -> int:
        return ((form & solution).bit_count() + (1 if form & const_bit else 0)) & 1

    dims = {d: m.dim(d) + m.dim(d - 1) for d in set(m.dims) | {d + 1 for d in m.dims}}
    actions = {}
    for k in exps:
        g = 1 << k
        for d in dims:
            d2 = d + g
            if d2 not in dims:
                continue
            P = m.gen(k, d)
            Q = m.gen(k, d - 1)
            C = cblock(k, d)
            rows = []
            for i in range(m.dim(d2)):
                rows.append(P.rows[i] if P.nrows else 0)
            for i in range(m.dim(d2 - 1)):
                crow = 0
                for j in range(m.dim(d)):
                    if evaluate(C[i][j]):
                        crow |= 1 << j
                qrow = Q.rows[i] if Q.nrows else 0
                rows.append(crow | (qrow << m.dim(d)))
            mat = F2Matrix(rows, dims[d])
            if not mat.is_zero():
                actions[(k, d)] = mat
    names = {
        d: m.names.get(d, ()) + tuple(f"s({x})" for x in m.names.get(d - 1, ()))
        for d in dims
    }
    return FiniteModule(FULL, dims, actions, names)


def extension_submodule(e: FiniteModule, m: FiniteModule) -> list[tuple[int, int]]:
    """Spanning vectors of the ``suspend(m, 1)`` copy inside ``mod2_extension(m)``."""
    out = []
    for d in e.degrees:
        base = m.dim(d)
        for i in range(m.dim(d - 1)):
            out.append((d, 1 << (base + i)))
    return out
