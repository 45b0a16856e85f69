"""Adams spectral sequence page bookkeeping.

A page is built from one or more Ext charts (a direct sum, each chart with
its own degree shift).  Classes are indexed by ``(s, t)`` with ``t`` the
true internal degree (normalized degree minus shift); the stem is
``t - s``.  Each page ``E_r`` is stored as a subquotient ``Z_r / B_r`` of
``E_2`` in every bidegree, and h-products are the ones of ``E_2`` read
modulo boundaries.  Differentials are imposed, never derived: the engine
checks them against h-linearity and propagates their consequences.
"""

from __future__ import annotations

from dataclasses import dataclass

from jokerkit.extres import H_MONOMIALS, ExtChart, ExtElement
from jokerkit.f2core import EchelonBasis, kernel_rows, transpose_rows


class IllegalDifferentialError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PageElement:
    """Vector over the ``E_2`` basis at bidegree ``(s, t)``."""

    s: int
    t: int
    bits: int

    @property
    def stem(self) -> int:
        return self.t - self.s

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.s, self.t)


Bidegree = tuple[int, int]


def _echelon(rows) -> EchelonBasis:
    e = EchelonBasis()
    for r in rows:
        e.add(r)
    return e


class ChartPage:
    """The page ``E_r``; immutable, operations return new pages."""

    def __init__(self, r: int, charts: tuple[ExtChart, ...], basis, cycles=None, boundaries=None, differentials=()):
        self.r = r
        self.charts = charts
        self.basis: dict[Bidegree, tuple] = basis
        self.cycles: dict[Bidegree, tuple[int, ...]] = dict(cycles or {})
        self.boundaries: dict[Bidegree, tuple[int, ...]] = dict(boundaries or {})
        self.differentials: tuple[tuple[PageElement, PageElement], ...] = tuple(differentials)
        self._index = {b: {lab: j for j, lab in enumerate(labs)} for b, labs in basis.items()}
        self._bech: dict[Bidegree, EchelonBasis] = {}

    # basics ------------------------------------------------------------
    def bidegrees(self) -> list[Bidegree]:
        return sorted(self.basis)

    def e2_dim(self, b: Bidegree) -> int:
        return len(self.basis.get(b, ()))

    def boundary_echelon(self, b: Bidegree) -> EchelonBasis:
        e = self._bech.get(b)
        if e is None:
            e = self._bech[b] = _echelon(self.boundaries.get(b, ()))
        return e

    def cycle_rows(self, b: Bidegree) -> tuple[int, ...]:
        if b in self.cycles:
            return self.cycles[b]
        return tuple(1 << j for j in range(self.e2_dim(b)))

    def reduce(self, x: PageElement) -> PageElement:
        """Canonical representative modulo boundaries."""
        return PageElement(x.s, x.t, self.boundary_echelon(x.bidegree).reduce(x.bits)[0])

    def is_zero(self, x: PageElement) -> bool:
        return self.reduce(x).bits == 0

    def is_cycle(self, x: PageElement) -> bool:
        return _echelon(self.cycle_rows(x.bidegree)).contains(x.bits)

    def classes(self, b: Bidegree) -> list[PageElement]:
        """Basis representatives of ``E_r`` at ``b``."""
        bech = _echelon(self.boundaries.get(b, ()))
        out = []
        for z in self.cycle_rows(b):
            res, _ = bech.reduce(z)
            if res:
                bech.add(res)
                out.append(PageElement(b[0], b[1], res))
        return out

    def dim(self, b: Bidegree) -> int:
        return len(self.classes(b))

    def all_classes(self) -> list[PageElement]:
        return [x for b in self.bidegrees() for x in self.classes(b)]

    def element(self, chart_index: int, s: int, t_norm: int, idx: int) -> PageElement:
        """The ``E_2`` class of a chart generator, in page coordinates."""
        chart = self.charts[chart_index]
        b = (s, chart.true_t(t_norm))
        j = self._index[b][(chart_index, t_norm, idx)]
        return PageElement(b[0], b[1], 1 << j)

    def label(self, x: PageElement) -> list[tuple[int, int, int, int]]:
        labs = self.basis.get(x.bidegree, ())
        return [(ci, x.s, tn, idx) for j, (ci, tn, idx) in enumerate(labs) if (x.bits >> j) & 1]

    # products ------------------------------------------------------------
    def h(self, i: int, x: PageElement) -> PageElement | None:
        """``h_i x`` computed in ``E_2`` (not reduced), or None if unknown."""
        b2 = (x.s + 1, x.t + (1 << i))
        out = 0
        bits = x.bits
        labs = self.basis.get(x.bidegree, ())
        index2 = self._index.get(b2, {})
        while bits:
            low = bits & -bits
            ci, tn, idx = labs[low.bit_length() - 1]
            bits ^= low
            chart = self.charts[ci]
            y = chart.h(i, ExtElement(x.s, tn, 1 << idx))
            if y is None:
                return None
            yb = y.bits
            while yb:
                lo2 = yb & -yb
                out ^= 1 << index2[(ci, tn + (1 << i), lo2.bit_length() - 1)]
                yb ^= lo2
        return PageElement(b2[0], b2[1], out)

    def h_word(self, word, x: PageElement) -> PageElement | None:
        for i in reversed(tuple(word)):
            x = self.h(i, x)
            if x is None:
                return None
        return x

    def h_exponents(self) -> list[int]:
        exps = set()
        for c in self.charts:
            exps.update(c.h_exponents)
        return sorted(exps)

    # serialization ----------------------------------------------------
    def coordinates(self, x: PageElement) -> int:
        """Coordinates of ``x`` over :meth:`classes` at its bidegree."""
        b = x.bidegree
        ech = EchelonBasis(track=True)
        for row in self.boundaries.get(b, ()):
            ech.add(row)
        nb = ech.count
        for c in self.classes(b):
            ech.add(c.bits)
        res, tag = ech.reduce(x.bits)
        if res:
            raise ValueError("element is not a cycle on this page")
        return tag >> nb

    def to_tsv(self) -> str:
        lines = [f"# module={c.module_hash} shift={c.shift}" for c in self.charts]
        lines.append(f"# page={self.r}")
        table = {b: self.classes(b) for b in self.bidegrees()}
        for b, reps in table.items():
            for j in range(len(reps)):
                lines.append(f"{b[0]}\t{b[1]}\t{j}")
        for i in self.h_exponents():
            for b, reps in table.items():
                for j, x in enumerate(reps):
                    y = self.h(i, x)
                    if y is None or y.bidegree not in self.basis:
                        continue
                    coords = self.coordinates(self.reduce(y)) if self.is_cycle(y) else 0
                    k = 0
                    while coords:
                        if coords & 1:
                            lines.append(f"h{i}\t{b[0]},{b[1]},{j}\t{y.s},{y.t},{k}")
                        coords >>= 1
                        k += 1
        for src, tgt in self.differentials:
            lines.append(f"d{self.r}\t{_format(self, src)}\t{_format(self, tgt)}")
        return "\n".join(lines) + "\n"


def _format(page: ChartPage, x: PageElement) -> str:
    coords = page.coordinates(page.reduce(x)) if x.bits else 0
    idx = [str(k) for k in range(coords.bit_length()) if (coords >> k) & 1]
    return f"{x.s},{x.t}," + ("+".join(idx) if idx else "0")


def page_from_chart(*charts: ExtChart) -> ChartPage:
    """Page ``E_2`` of the direct sum of the given charts."""
    basis: dict[Bidegree, list] = {}
    for ci, c in enumerate(charts):
        for s, t, idx in c.classes():
            basis.setdefault((s, c.true_t(t)), []).append((ci, t, idx))
    return ChartPage(2, tuple(charts), {b: tuple(v) for b, v in sorted(basis.items())})


def target_bidegree(source: PageElement, r: int) -> Bidegree:
    return (source.s + r, source.t + r - 1)


def target_candidates(p: ChartPage, source: PageElement, r: int | None = None) -> list[PageElement]:
    """Every class of the page in the bidegree a ``d_r`` from ``source`` hits."""
    r = p.r if r is None else r
    return p.classes(target_bidegree(source, r))


def _constraint_kernel(p: ChartPage, reps: list[PageElement], words) -> list[int]:
    """Combinations (over ``reps``) killed by every word in ``words`` modulo
    boundaries; unknown products impose nothing."""
    images = [0] * len(reps)
    width = 0
    for word in words:
        outs = [p.h_word(word, x) for x in reps]
        if any(y is None for y in outs):
            continue
        b2 = outs[0].bidegree if outs else None
        n2 = p.e2_dim(b2) if b2 else 0
        for j, y in enumerate(outs):
            images[j] |= p.reduce(y).bits << width
        width += n2
    rows = transpose_rows(images, width)
    return kernel_rows(rows, len(reps))


def possible_targets(p: ChartPage, source: PageElement, r: int | None = None) -> list[PageElement]:
    """Basis of the targets allowed for ``d_r(source)`` by h-linearity.

    A target must be killed by every h-monomial of length at most two that
    is known to kill ``source``.  An empty list means only zero is allowed.
    """
    r = p.r if r is None else r
    reps = target_candidates(p, source, r)
    if not reps:
        return []
    killers = [w for w in H_MONOMIALS if _kills(p, w, source)]
    out = []
    for combo in _constraint_kernel(p, reps, killers):
        bits = 0
        for j, x in enumerate(reps):
            if (combo >> j) & 1:
                bits ^= x.bits
        out.append(PageElement(reps[0].s, reps[0].t, bits))
    return out


def _kills(p: ChartPage, word, x: PageElement) -> bool:
    if any(i not in p.h_exponents() for i in word):
        return False
    y = p.h_word(word, x)
    return y is not None and p.is_zero(y)


def page_annihilators(p: ChartPage, x: PageElement) -> list[tuple[int, ...]]:
    return [w for w in H_MONOMIALS if _kills(p, w, x)]


def impose_differential(p: ChartPage, source: PageElement, target: PageElement) -> ChartPage:
    """Record ``d_r(source) = target`` with every h-multiple of it."""
    if target.bidegree != target_bidegree(source, p.r) and target.bits:
        raise IllegalDifferentialError(
            f"illegal target: d_{p.r} from {source.bidegree} must land in {target_bidegree(source, p.r)}"
        )
    target = PageElement(*target_bidegree(source, p.r), target.bits)
    if not p.is_cycle(source):
        raise IllegalDifferentialError("illegal source: not a class on this page")
    if not p.is_cycle(target):
        raise IllegalDifferentialError("illegal target: not a class on this page")
    pairs: list[tuple[PageElement, PageElement]] = []
    seen = set()
    queue = [(p.reduce(source), p.reduce(target))]
    exps = p.h_exponents()
    while queue:
        x, y = queue.pop(0)
        if (x, y) in seen:
            continue
        seen.add((x, y))
        if p.is_zero(x):
            if not p.is_zero(y):
                raise IllegalDifferentialError(
                    f"illegal target: Leibniz rule fails, zero class at {x.bidegree} would hit {y.bidegree}"
                )
            continue
        pairs.append((x, y))
        for i in exps:
            hx = p.h(i, x)
            if hx is None:
                continue
            hy = p.h(i, y)
            if hy is None:
                continue
            queue.append((p.reduce(hx), p.reduce(hy)))
    all_pairs = list(p.differentials) + pairs
    _check_consistent(p, all_pairs)
    return ChartPage(p.r, p.charts, p.basis, p.cycles, p.boundaries, all_pairs)


def _check_consistent(p: ChartPage, pairs) -> None:
    by_source: dict[Bidegree, list] = {}
    for x, y in pairs:
        by_source.setdefault(x.bidegree, []).append((x, y))
    for b, items in by_source.items():
        n = p.e2_dim(b)
        ech = EchelonBasis()
        for row in p.boundaries.get(b, ()):
            ech.add(row)
        for x, y in items:
            v = p.reduce(x).bits | (p.reduce(y).bits << n)
            res, _ = ech.reduce(v)
            if res and not res & ((1 << n) - 1):
                raise IllegalDifferentialError(
                    f"illegal target: differentials on {b} are inconsistent with linearity"
                )
            if res:
                ech.add(res)


def turn_page(p: ChartPage) -> ChartPage:
    """``E_(r+1) = ker d_r / im d_r``.

    ``d_r`` is the linear map determined by the imposed pairs on their span
    and zero on a canonical complement of that span in the cycles.
    """
    by_source: dict[Bidegree, list] = {}
    for x, y in p.differentials:
        by_source.setdefault(x.bidegree, []).append((x, y))
    cycles = dict(p.cycles)
    boundaries = {b: list(rows) for b, rows in p.boundaries.items()}
    for b, items in sorted(by_source.items()):
        b2 = (b[0] + p.r, b[1] + p.r - 1)
        n = p.e2_dim(b)
        m = p.e2_dim(b2)
        bound_rows = list(p.boundaries.get(b, ()))
        # kernel of d_r inside span(boundaries + sources): put targets in the
        # low bits so rows pivoting above them have zero image
        ech = EchelonBasis()
        for row in bound_rows:
            ech.add(row << m)
        for x, y in items:
            ech.add(p.reduce(y).bits | (p.reduce(x).bits << m))
        kernel = [row >> m for row in ech.rows() if not row & ((1 << m) - 1)]
        span = _echelon(bound_rows + [x.bits for x, _ in items])
        complement = []
        for z in p.cycle_rows(b):
            res, _ = span.reduce(z)
            if res:
                span.add(res)
                complement.append(res)
        cycles[b] = tuple(_echelon(kernel + complement).rows())
        targets = boundaries.setdefault(b2, [])
        targets.extend(p.reduce(y).bits for _, y in items if p.reduce(y).bits)
    boundaries = {b: tuple(_echelon(rows).rows()) for b, rows in boundaries.items() if rows}
    return ChartPage(p.r + 1, p.charts, p.basis, cycles, boundaries, ())


def h0_torsion_report(p: ChartPage, min_filtration: int, stems=None) -> list[PageElement]:
    """Nonzero classes with ``s >= min_filtration`` killed by a power of ``h_0``.

    Only powers whose products are all inside the computed range are used,
    so classes at the top of the range are never reported.  ``stems``
    optionally restricts to a collection of stems.
    """
    out = []
    if 0 not in p.h_exponents():
        return out
    for b in p.bidegrees():
        s, t = b
        if s < min_filtration or (stems is not None and t - s not in stems):
            continue
        reps = p.classes(b)
        if not reps:
            continue
        images = list(reps)
        kernel: list[int] = []
        while True:
            nxt = [p.h(0, y) for y in images]
            if any(y is None for y in nxt):
                break
            nxt = [p.reduce(y) for y in nxt]
            n2 = p.e2_dim(nxt[0].bidegree)
            cols = [y.bits for y in nxt]
            kernel = kernel_rows(transpose_rows(cols, n2), len(reps))
            images = nxt
            if not any(y.bits for y in nxt):
                break
        for combo in kernel:
            bits = 0
            for j, x in enumerate(reps):
                if (combo >> j) & 1:
                    bits ^= x.bits
            out.append(PageElement(s, t, bits))
    return out


# --------------------------------------------------------------------------
# the obstruction argument for the rank-4 Dickson realization


@dataclass
class ArgumentStep:
    name: str
    passed: bool
    detail: str


@dataclass
class ObstructionData:
    bottom_chart: ExtChart
    top_chart: ExtChart
    page2: ChartPage
    page3: ChartPage | None
    iota: PageElement
    x16: PageElement
    y: PageElement | None
    steps: list[ArgumentStep]


def _least_preimage(f, elements_bits: int, s: int, t: int, want: int) -> int | None:
    for bits in range(1 << elements_bits):
        if f(ExtElement(s, t, bits)).bits == want:
            return bits
    return None


def obstruction_argument(s_max: int = 10, t_max: int = 34) -> ObstructionData:
    """Charts of the two A(2)-summands of ``Y``, the ``d_2`` on ``x_-16``
    and the survival checks for the class ``iota`` in stem -15."""
    from jokerkit.dickson import build_Y_module
    from jokerkit.extres import ext_chart, identity_map, induced_ext_map, lift_module_map, minimal_resolution
    from jokerkit.fpmodule import degree_window, dual, restrict, split_at, suspend

    steps: list[ArgumentStep] = []

    def step(name: str, ok: bool, detail: str = "") -> bool:
        steps.append(ArgumentStep(name, bool(ok), detail))
        return ok

    y_mod = restrict(build_Y_module(), 2)
    bottom, top = split_at(y_mod, 15)
    step("Y splits over A(2) at degree 15", True, f"{sorted(bottom.dims)} | {sorted(top.dims)}")
    d_bottom, sh_bottom = dual(bottom)
    d_top, sh_top = dual(top)
    r_bottom = minimal_resolution(d_bottom, s_max, t_max)
    r_top = minimal_resolution(d_top, s_max, t_max)
    c_bottom = ext_chart(r_bottom, shift=sh_bottom)
    c_top = ext_chart(r_top, shift=sh_top)

    ext0 = [(s, t, i) for s, t, i in c_bottom.classes() if s == 0]
    step("bottom chart has a unique class in filtration 0", len(ext0) == 1,
         f"classes {ext0}, stems {[c_bottom.stem(s, t) for s, t, _ in ext0]}")
    ok_iota = len(ext0) == 1 and c_bottom.stem(0, ext0[0][1]) == -15
    step("that class iota sits in stem -15", ok_iota)

    page2 = page_from_chart(c_bottom, c_top)
    iota = page2.element(0, *ext0[0]) if ext0 else None
    x16_classes = [(s, t, i) for s, t, i in c_top.classes() if s == 0 and c_top.stem(s, t) == -16]
    step("top chart has x_-16 in stem -16", len(x16_classes) == 1, f"{x16_classes}")
    x16 = page2.element(1, *x16_classes[0]) if x16_classes else None
    if iota is None or x16 is None:
        return ObstructionData(c_bottom, c_top, page2, None, iota, x16, None, steps)

    ann = page_annihilators(page2, iota)
    step("h0 iota = 0", (0,) in ann)
    step("h1^2 iota = 0", (1, 1) in ann)
    d2_targets = possible_targets(page2, iota, 2)
    step("no possible d2 target for iota", not d2_targets, f"candidates {target_candidates(page2, iota, 2)}")

    # y: the class restricting to x_-20 h0 h2 on the 16..20 skeleton
    window = degree_window(top, None, 20)
    d_win, sh_win = dual(window)
    d_win = suspend(d_win, sh_top - sh_win)
    fmap = identity_map(d_win)
    r_win = minimal_resolution(d_win, s_max, t_max)
    c_win = ext_chart(r_win, shift=sh_top)
    x20 = [(s, t, i) for s, t, i in c_win.classes() if s == 0 and c_win.stem(s, t) == -20]
    step("x_-20 exists on the 16..20 skeleton", len(x20) == 1)
    x20h0h2 = c_win.h_word((0, 2), c_win.element(*x20[0])) if x20 else None
    step("x_-20 h0 h2 is nonzero", bool(x20h0h2), f"{x20h0h2}")
    y = None
    if x20h0h2:
        lifts = lift_module_map(r_win, r_top, fmap)
        f = induced_ext_map(r_win, r_top, lifts)
        s, t = x20h0h2.s, x20h0h2.t
        bits = _least_preimage(f, c_top.count(s, t), s, t, x20h0h2.bits)
        step("x_-20 h0 h2 lifts to a class y", bits is not None and bits != 0, f"bits {bits}")
        if bits:
            y = PageElement(s, c_top.true_t(t), 0)
            for j in range(c_top.count(s, t)):
                if (bits >> j) & 1:
                    y = PageElement(y.s, y.t, y.bits ^ page2.element(1, s, t, j).bits)
    if y is None:
        return ObstructionData(c_bottom, c_top, page2, None, iota, x16, None, steps)

    try:
        page2d = impose_differential(page2, x16, y)
        step("d2(x_-16) = y is h-linear", True, f"{len(page2d.differentials)} differentials after closure")
    except IllegalDifferentialError as exc:
        step("d2(x_-16) = y is h-linear", False, str(exc))
        return ObstructionData(c_bottom, c_top, page2, None, iota, x16, y, steps)
    page3 = turn_page(page2d)
    x16h0_3 = page3.reduce(page3.h_word((0, 0, 0), x16))
    cands = target_candidates(page3, iota, 3)
    only = len(cands) == 1 and page3.reduce(cands[0]) == x16h0_3
    step("the only d3 candidate is x_-16 h0^3", only, f"{len(cands)} candidates")
    step("x_-16 h0^3 is excluded by h0 iota = 0", not possible_targets(page3, iota, 3))
    torsion = h0_torsion_report(page3, 4, stems={iota.stem - 1})
    step("no h0-torsion in filtration >= 4 in stem -16", not torsion, f"{torsion}")
    # a target in the top filtration has unknown products and so cannot be
    # constrained; pages are checked while the target filtration stays below it
    pages = range(4, s_max)
    later = [r for r in pages if possible_targets(page3, iota, r)]
    step("no possible targets for iota on later pages", not later,
         f"pages {pages.start}..{pages.stop - 1} checked, with targets: {later}")
    return ObstructionData(c_bottom, c_top, page2, page3, iota, x16, y, steps)
