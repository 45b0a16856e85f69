"""Minimal free resolutions over ``A(n)`` and Ext charts with h-products.

Resolutions are built degree by degree: for each internal degree ``t`` and
each homological degree ``s`` in turn, new generators are chosen as a
canonical complement of the image of the older generators inside the
kernel of the previous differential.  Minimality means the Ext groups are
spanned by the duals of the generators, and multiplication by ``h_i`` is
read off from the coefficient of ``Sq^(2^i)`` in the differential.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from jokerkit.f2core import EchelonBasis, kernel_rows, rank_rows, solve_rows, transpose_rows
from jokerkit.fpmodule import FiniteModule
from jokerkit.steenrod import SubalgebraSpec, algebra_tables

DEFAULT_S_MAX = 12
DEFAULT_T_MAX = 40


class ResolutionLimitError(RuntimeError):
    """Raised when a free module grows past the configured size; carries the
    partial resolution computed so far."""

    def __init__(self, message: str, partial: "FreeResolution"):
        super().__init__(message)
        self.partial = partial


def module_hash(m: FiniteModule) -> str:
    return hashlib.sha256(f"{m.algebra}\n{m.to_text()}".encode()).hexdigest()


class FreeResolution:
    """Minimal free resolution ``... -> F_1 -> F_0 -> M`` over ``A(n)``.

    ``gens[s]`` lists generator degrees of ``F_s`` in creation order and
    ``dvals[s][g]`` is the image of generator ``g`` packed in the basis of
    ``F_(s-1)`` (or of ``M`` for ``s = 0``) in that degree.  The basis of
    ``F_s`` in degree ``t`` lists, generator by generator, the algebra basis
    words of degree ``t - deg(g)``.
    """

    def __init__(self, module: FiniteModule, s_max: int, t_max: int):
        if module.algebra.is_full:
            raise ValueError("resolutions need a finite algebra A(n)")
        self.module = module
        self.algebra: SubalgebraSpec = module.algebra
        self.tables = algebra_tables(self.algebra)
        self.tables.complete()
        self.s_max = s_max
        self.t_max = t_max
        self.gens: list[list[int]] = [[] for _ in range(s_max + 1)]
        self.dvals: list[list[int]] = [[] for _ in range(s_max + 1)]
        self._dcols: dict[tuple[int, int], list[int]] = {}
        self.t_done = None  # last fully processed internal degree

    # layout --------------------------------------------------------------
    def dim(self, s: int, t: int) -> int:
        if s < 0:
            return self.module.dim(t)
        return sum(self.tables.dim(t - dg) for dg in self.gens[s] if dg <= t)

    def offsets(self, s: int, t: int) -> list[int | None]:
        """Offset of each generator's block in ``F_s`` at degree ``t``."""
        out: list[int | None] = []
        pos = 0
        for dg in self.gens[s]:
            n = self.tables.dim(t - dg) if dg <= t else 0
            out.append(pos if n else None)
            pos += n
        return out

    def generators_in(self, s: int, t: int) -> list[int]:
        return [g for g, dg in enumerate(self.gens[s]) if dg == t]

    def class_index(self, s: int, g: int) -> int:
        """Position of generator ``g`` among stage-``s`` generators of its degree."""
        dg = self.gens[s][g]
        return sum(1 for h in range(g) if self.gens[s][h] == dg)

    def generator_id(self, s: int, t: int, idx: int) -> int:
        return self.generators_in(s, t)[idx]

    # action of the algebra on free modules ------------------------------
    def act(self, s: int, e: int, i: int, v: int, u: int) -> int:
        """Basis word ``(e, i)`` times ``v`` in ``F_s`` at degree ``u``."""
        if not v:
            return 0
        if s < 0:
            return self.module.basis_action(e, i, u).apply(v)
        t = self.tables
        src = self.offsets(s, u)
        dst = self.offsets(s, u + e)
        out = 0
        for g, dg in enumerate(self.gens[s]):
            off = src[g]
            if off is None:
                continue
            n = t.dim(u - dg)
            block = (v >> off) & ((1 << n) - 1)
            if not block:
                continue
            doff = dst[g]
            while block:
                low = block & -block
                j = low.bit_length() - 1
                block ^= low
                prod = t.product(e, i, u - dg, j)
                if prod:
                    out ^= prod << doff
        return out

    def d_columns(self, s: int, t: int) -> list[int]:
        """Columns of ``d_s`` in degree ``t`` (one per basis element of ``F_s``)."""
        key = (s, t)
        cols = self._dcols.get(key)
        if cols is not None:
            return cols
        cols = []
        for g, dg in enumerate(self.gens[s]):
            if dg > t:
                continue
            e = t - dg
            for j in range(self.tables.dim(e)):
                cols.append(self.act(s - 1, e, j, self.dvals[s][g], dg))
        if self.t_done is not None and t <= self.t_done:
            self._dcols[key] = cols
        return cols

    def apply_d(self, s: int, v: int, t: int) -> int:
        out = 0
        cols = self.d_columns(s, t)
        while v:
            low = v & -v
            out ^= cols[low.bit_length() - 1]
            v ^= low
        return out

    # construction ---------------------------------------------------------
    def _step(self, s: int, t: int, max_dim: int) -> None:
        if self.dim(s, t) > max_dim:
            raise ResolutionLimitError(f"F_{s} in degree {t} exceeds {max_dim} dimensions", self)
        if s == 0:
            kernel = [1 << i for i in range(self.module.dim(t))]
        else:
            prev = self.d_columns(s - 1, t)
            if not prev:
                return
            rows = transpose_rows(prev, self.dim(s - 2, t))
            kernel = kernel_rows(rows, len(prev))
        if not kernel:
            self._dcols[(s, t)] = self.d_columns(s, t)
            return
        image = EchelonBasis()
        old_cols = self.d_columns(s, t)
        for c in old_cols:
            image.add(c)
        new = []
        for v in kernel:
            res = image.reduce(v)[0]
            if res:
                image.add(res)
                new.append(res)
        for res in new:
            self.gens[s].append(t)
            self.dvals[s].append(res)
        if self.dim(s, t) > max_dim:
            raise ResolutionLimitError(f"F_{s} in degree {t} exceeds {max_dim} dimensions", self)
        self._dcols[(s, t)] = old_cols + new

    def extend(self, t_max: int, max_dim: int = 50000) -> None:
        start = self.module.lo if self.t_done is None else self.t_done + 1
        if self.module.is_zero():
            self.t_done = t_max
            return
        for t in range(start, t_max + 1):
            for s in range(self.s_max + 1):
                self._step(s, t, max_dim)
            self.t_done = t
        self.t_max = max(self.t_max, t_max)

    # checks ----------------------------------------------------------------
    def ext_dims(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for s, degs in enumerate(self.gens):
            for dg in degs:
                out[(s, dg)] = out.get((s, dg), 0) + 1
        return out

    def check_d_squared(self) -> bool:
        for s in range(1, self.s_max + 1):
            for g, dg in enumerate(self.gens[s]):
                if self.apply_d(s - 1, self.dvals[s][g], dg):
                    return False
        return True

    def check_minimality(self) -> bool:
        """No differential has a unit coefficient; for ``s = 0`` the
        generators map to a basis of ``M`` modulo decomposables."""
        for s in range(1, self.s_max + 1):
            for g, dg in enumerate(self.gens[s]):
                offs = self.offsets(s - 1, dg)
                for h, dh in enumerate(self.gens[s - 1]):
                    if dh == dg and (self.dvals[s][g] >> offs[h]) & 1:
                        return False
        m = self.module
        for t in m.degrees:
            if t > self.t_max:
                break
            dec = EchelonBasis()
            for k in m.generator_exponents():
                src = t - (1 << k)
                if m.dim(src):
                    for r in m.gen(k, src).columns():
                        dec.add(r)
            vals = [self.dvals[0][g] for g in self.generators_in(0, t)]
            for v in vals:
                if not dec.add(v)[0]:
                    return False
            if len(dec) != m.dim(t):
                return False
        return True

    def check_exactness(self) -> bool:
        """Rank test of exactness at every ``F_s`` below the top stage."""
        for t in range(self.module.lo if self.module.dims else 0, self.t_max + 1):
            if self.module.dim(t):
                cols = self.d_columns(0, t)
                if rank_rows(transpose_rows(cols, self.module.dim(t)), len(cols)) != self.module.dim(t):
                    return False
            for s in range(self.s_max):
                n = self.dim(s, t)
                if not n:
                    continue
                cols = self.d_columns(s, t)
                r_here = rank_rows(transpose_rows(cols, self.dim(s - 1, t)), len(cols)) if cols else 0
                nxt = self.d_columns(s + 1, t)
                r_next = rank_rows(transpose_rows(nxt, n), len(nxt)) if nxt else 0
                if n - r_here != r_next:
                    return False
        return True


def minimal_resolution(m: FiniteModule, s_max: int = DEFAULT_S_MAX, t_max: int = DEFAULT_T_MAX,
                       max_dim: int = 50000) -> FreeResolution:
    res = FreeResolution(m, s_max, t_max)
    res.extend(t_max, max_dim)
    return res


# --------------------------------------------------------------------------
# charts


@dataclass(frozen=True, order=True)
class ExtElement:
    """A vector in ``Ext^(s,t)`` over the basis of generator duals."""

    s: int
    t: int
    bits: int

    def __bool__(self) -> bool:
        return self.bits != 0


@dataclass
class ExtChart:
    algebra: SubalgebraSpec
    shift: int
    module_hash: str
    s_max: int
    t_max: int
    counts: dict[tuple[int, int], int]
    h_exponents: list[int]
    # products[i][(s, t, idx)] = sorted target indices at (s+1, t+2^i)
    products: dict[int, dict[tuple[int, int, int], tuple[int, ...]]] = field(default_factory=dict)
    with_products: bool = True

    def classes(self) -> list[tuple[int, int, int]]:
        return [(s, t, i) for (s, t), n in sorted(self.counts.items()) for i in range(n)]

    def count(self, s: int, t: int) -> int:
        return self.counts.get((s, t), 0)

    def stem(self, s: int, t: int) -> int:
        return t - s - self.shift

    def true_t(self, t: int) -> int:
        return t - self.shift

    def element(self, s: int, t: int, idx: int) -> ExtElement:
        if not 0 <= idx < self.count(s, t):
            raise IndexError(f"no class {idx} at ({s}, {t})")
        return ExtElement(s, t, 1 << idx)

    def product_known(self, i: int, s: int, t: int) -> bool:
        return self.with_products and i in self.h_exponents and s + 1 <= self.s_max and t + (1 << i) <= self.t_max

    def h(self, i: int, x: ExtElement) -> ExtElement | None:
        """``h_i x``, or None when it lies outside the computed range."""
        if not self.product_known(i, x.s, x.t):
            return None
        out = 0
        bits = x.bits
        table = self.products.get(i, {})
        while bits:
            low = bits & -bits
            for j in table.get((x.s, x.t, low.bit_length() - 1), ()):
                out ^= 1 << j
            bits ^= low
        return ExtElement(x.s + 1, x.t + (1 << i), out)

    def h_word(self, word, x: ExtElement) -> ExtElement | None:
        for i in reversed(tuple(word)):
            x = self.h(i, x)
            if x is None:
                return None
        return x

    def to_tsv(self) -> str:
        lines = [f"# module={self.module_hash} shift={self.shift}"]
        for s, t, i in self.classes():
            lines.append(f"{s}\t{t}\t{i}")
        for i in sorted(self.products):
            for (s, t, idx), targets in sorted(self.products[i].items()):
                for j in targets:
                    lines.append(f"h{i}\t{s},{t},{idx}\t{s + 1},{t + (1 << i)},{j}")
        return "\n".join(lines) + "\n"


def ext_chart(r: FreeResolution, with_products: bool = True, shift: int = 0) -> ExtChart:
    counts: dict[tuple[int, int], int] = {}
    for s, degs in enumerate(r.gens):
        for dg in degs:
            counts[(s, dg)] = counts.get((s, dg), 0) + 1
    level = r.algebra.level
    exps = list(range(min(level, 2) + 1))
    products: dict[int, dict] = {}
    if with_products:
        t = r.tables
        for i in exps:
            table: dict[tuple[int, int, int], list[int]] = {}
            word = t.indecomposable_index(i)
            for s in range(r.s_max):
                for g2, dg2 in enumerate(r.gens[s + 1]):
                    src_deg = dg2 - (1 << i)
                    offs = r.offsets(s, dg2)
                    v = r.dvals[s + 1][g2]
                    for g, dg in enumerate(r.gens[s]):
                        if dg != src_deg or offs[g] is None:
                            continue
                        if (v >> (offs[g] + word)) & 1:
                            key = (s, dg, r.class_index(s, g))
                            table.setdefault(key, []).append(r.class_index(s + 1, g2))
            products[i] = {k: tuple(sorted(v)) for k, v in table.items()}
    return ExtChart(r.algebra, shift, module_hash(r.module), r.s_max, r.t_max, counts, exps, products, with_products)


H_MONOMIALS = [(0,), (1,), (2,)] + [w for w in combinations_with_replacement(range(3), 2)]


def annihilators(c: ExtChart, cls) -> list[tuple[int, ...]]:
    """h-monomials of length at most two known to kill ``cls``.

    ``cls`` is an :class:`ExtElement` or an ``(s, t, idx)`` triple.
    """
    x = cls if isinstance(cls, ExtElement) else c.element(*cls)
    out = []
    for word in H_MONOMIALS:
        if any(i not in c.h_exponents for i in word):
            continue
        if not x:
            out.append(word)
            continue
        y = c.h_word(word, x)
        if y is not None and not y:
            out.append(word)
    return out


# --------------------------------------------------------------------------
# induced maps


def lift_module_map(src: FreeResolution, tgt: FreeResolution, fmap: dict) -> list[list[int]]:
    """Chain map ``F^src -> F^tgt`` over a degree-preserving module map.

    ``fmap[d]`` is the matrix from ``src.module`` to ``tgt.module`` in
    degree ``d``.  Returns ``f[s][g]``: the image of source generator ``g``
    packed in the basis of ``F^tgt_s`` in its degree.
    """
    if src.algebra != tgt.algebra:
        raise ValueError("resolutions over different algebras")
    s_top = min(src.s_max, tgt.s_max)
    t_top = min(src.t_max, tgt.t_max)
    lifts: list[list[int]] = []
    for s in range(s_top + 1):
        row = []
        for g, dg in enumerate(src.gens[s]):
            if dg > t_top:
                row.append(None)
                continue
            dv = src.dvals[s][g]
            if s == 0:
                mat = fmap.get(dg)
                rhs = mat.apply(dv) if mat is not None else 0
            else:
                rhs = _apply_chain(src, tgt, lifts[s - 1], s - 1, dv, dg)
            cols = tgt.d_columns(s, dg)
            sol = solve_rows(transpose_rows(cols, tgt.dim(s - 1, dg)), len(cols), rhs)
            if sol is None:
                raise ValueError(f"chain map does not lift at stage {s}, degree {dg}")
            row.append(sol)
        lifts.append(row)
    return lifts


def _apply_chain(src: FreeResolution, tgt: FreeResolution, f: list[int], s: int, v: int, u: int) -> int:
    """Image under the stage-``s`` chain map of ``v`` in ``F^src_s`` at degree ``u``."""
    out = 0
    offs = src.offsets(s, u)
    t = src.tables
    for g, dg in enumerate(src.gens[s]):
        off = offs[g]
        if off is None:
            continue
        n = t.dim(u - dg)
        block = (v >> off) & ((1 << n) - 1)
        while block:
            low = block & -block
            j = low.bit_length() - 1
            block ^= low
            out ^= tgt.act(s, u - dg, j, f[g], dg)
    return out


def induced_ext_map(src: FreeResolution, tgt: FreeResolution, lifts: list[list[int]]):
    """The map ``Ext(tgt.module) -> Ext(src.module)`` given by the lift.

    Returns a function ``ExtElement -> ExtElement``.
    """

    def apply(x: ExtElement) -> ExtElement:
        s, t = x.s, x.t
        tgt_gens = tgt.generators_in(s, t)
        offs_cache: dict[int, list] = {}
        out = 0
        for idx, g in enumerate(src.generators_in(s, t)):
            img = lifts[s][g]
            if img is None:
                raise ValueError("class outside the lifted range")
            offs = offs_cache.setdefault(t, tgt.offsets(s, t))
            val = 0
            for j, h in enumerate(tgt_gens):
                if (x.bits >> j) & 1 and (img >> offs[h]) & 1:
                    val ^= 1
            if val:
                out |= 1 << idx
        return ExtElement(s, t, out)

    return apply


def identity_map(m: FiniteModule) -> dict:
    from jokerkit.f2core import F2Matrix

    return {d: F2Matrix.identity(n) for d, n in m.dims.items()}


# --------------------------------------------------------------------------
# bar-complex oracle


def bar_complex_ext_dims(m: FiniteModule, s_max: int, t_max: int) -> dict[tuple[int, int], int]:
    """``dim Ext^(s,t)_(A(n))(M, F_2)`` through the normalized bar complex.

    ``Tor`` is computed from ``B_s = Abar^(x s) (x) M`` with dense ranks; it
    shares nothing with :func:`minimal_resolution` beyond the algebra tables.
    """
    t_tab = algebra_tables(m.algebra)
    t_tab.complete()
    lo = m.lo if m.dims else 0

    def basis(s: int, t: int) -> list[tuple]:
        out = []

        def rec(k: int, remaining: int, acc: tuple):
            if k == s:
                for d, n in m.dims.items():
                    if d == remaining:
                        for i in range(n):
                            out.append(acc + ((d, i),))
                return
            for e in range(1, remaining - lo + 1):
                for i in range(t_tab.dim(e)):
                    rec(k + 1, remaining - e, acc + ((e, i),))

        rec(0, t, ())
        return out

    cache: dict[tuple[int, int], tuple[list, dict]] = {}

    def indexed(s: int, t: int):
        if (s, t) not in cache:
            b = basis(s, t)
            cache[(s, t)] = (b, {x: j for j, x in enumerate(b)})
        return cache[(s, t)]

    def boundary_rank(s: int, t: int) -> int:
        if s == 0:
            return 0
        src, _ = indexed(s, t)
        _, tgt_index = indexed(s - 1, t)
        rows = []
        for x in src:
            v = 0
            for j in range(s - 1):
                (e1, i1), (e2, i2) = x[j], x[j + 1]
                prod = t_tab.product(e1, i1, e2, i2)
                while prod:
                    low = prod & -prod
                    k = low.bit_length() - 1
                    prod ^= low
                    y = x[:j] + ((e1 + e2, k),) + x[j + 2:]
                    v ^= 1 << tgt_index[y]
            (e, i), (d, mi) = x[s - 1], x[s]
            img = m.basis_action(e, i, d).apply(1 << mi) if m.dim(d + e) else 0
            while img:
                low = img & -img
                img ^= low
                y = x[: s - 1] + ((d + e, low.bit_length() - 1),)
                v ^= 1 << tgt_index[y]
            rows.append(v)
        return rank_rows(rows, len(tgt_index))

    dims = {}
    ranks: dict[tuple[int, int], int] = {}
    for t in range(lo, t_max + 1):
        for s in range(s_max + 2):
            ranks[(s, t)] = boundary_rank(s, t)
        for s in range(s_max + 1):
            n = len(indexed(s, t)[0])
            d = n - ranks[(s, t)] - ranks[(s + 1, t)]
            if d:
                dims[(s, t)] = d
    return dims
