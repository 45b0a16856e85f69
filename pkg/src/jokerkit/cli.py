"""Command-line front end: ``jokerkit <group> <command> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from jokerkit import claims, dickson, extres, fpmodule, sseq
from jokerkit.fpmodule import FiniteModule, ModuleFormatError
from jokerkit.steenrod import FULL, SubalgebraSpec

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


PRESETS = {
    "joker": lambda bound: fpmodule.joker(4 if bound is None else bound),
    "question_mark": lambda bound: fpmodule.question_mark(3 if bound is None else bound),
    "trivial": lambda bound: fpmodule.cyclic_quotient(fpmodule.trivial_presentation(4 if bound is None else bound)),
    "ko": lambda bound: fpmodule.induced_quotient_module(1, 16 if bound is None else bound),
    "tmf": lambda bound: fpmodule.induced_quotient_module(2, 24 if bound is None else bound),
}
PRESET_ALIASES = {"j": "joker", "qmark": "question_mark", "question-mark": "question_mark", "f2": "trivial"}


def _algebra(text: str | None, default: SubalgebraSpec = FULL) -> SubalgebraSpec:
    if text is None:
        return default
    try:
        return SubalgebraSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_module(path: str, algebra: SubalgebraSpec = FULL) -> FiniteModule:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return FiniteModule.from_text(text, algebra)
    except ModuleFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None
    except fpmodule.ModuleStructureError as exc:
        raise UsageError(f"{path}: not a module: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _module_for(path: str, algebra: SubalgebraSpec | None) -> FiniteModule:
    """Read a module written over ``A`` and restrict it when asked."""
    m = _read_module(path)
    if algebra is not None and not algebra.is_full:
        m = fpmodule.restrict(m, algebra.level)
    return m


# --------------------------------------------------------------------------
# module commands


def cmd_module_build(args) -> int:
    preset = args.preset or Path(args.output).stem
    preset = PRESET_ALIASES.get(preset, preset)
    if preset not in PRESETS:
        raise UsageError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
    m = PRESETS[preset](args.bound)
    _write(args.output, m.to_text(comment=f"{preset}, bound {args.bound}" if args.bound is not None else preset))
    return EXIT_OK


def cmd_module_dual(args) -> int:
    m = _read_module(args.input)
    d, shift = fpmodule.dual(m)
    _write(args.output, d.to_text(comment=f"dual, shift {shift}"))
    print(f"shift {shift}", file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return EXIT_OK


def cmd_module_double(args) -> int:
    m = _read_module(args.input)
    if args.k < 0:
        raise UsageError("--k must be nonnegative")
    _write(args.output, fpmodule.double(m, args.k).to_text(comment=f"double, k={args.k}"))
    return EXIT_OK


def cmd_module_sigma(args) -> int:
    m = _read_module(args.input)
    if m.is_zero():
        raise UsageError("the zero module has no unstable degree")
    print(fpmodule.unstable_degree(m))
    return EXIT_OK


def cmd_module_split(args) -> int:
    m = _module_for(args.input, _algebra(args.algebra, FULL))
    try:
        lo, hi = fpmodule.split_at(m, args.cut)
    except fpmodule.NotADirectSumError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAILED
    print(f"low: {sorted(lo.dims)}")
    print(f"high: {sorted(hi.dims)}")
    if args.output:
        base = Path(args.output)
        Path(f"{base}.low.mod").write_text(lo.to_text())
        Path(f"{base}.high.mod").write_text(hi.to_text())
    return EXIT_OK


def cmd_module_iso(args) -> int:
    algebra = _algebra(args.algebra, FULL)
    m1 = _module_for(args.first, algebra)
    m2 = _module_for(args.second, algebra)
    print("true" if fpmodule.is_isomorphic(m1, m2) else "false")
    return EXIT_OK


# --------------------------------------------------------------------------
# dickson commands


def _rank(n: int) -> int:
    if not 1 <= n <= dickson.MAX_RANK:
        raise UsageError(f"--n must be between 1 and {dickson.MAX_RANK}")
    return n


def cmd_dickson_gens(args) -> int:
    pres = dickson.dickson_generators(_rank(args.n))
    for d, p in pres.generators.items():
        print(f"x{d} = {p}")
    return EXIT_OK


def cmd_dickson_skeleton(args) -> int:
    m = dickson.skeleton_module(_rank(args.n), args.bound)
    names = " ".join(n for d in m.degrees for n in m.names[d])
    _write(args.output, m.to_text(comment=f"reduced DI({args.n}) through degree {args.bound}\nclasses: {names}"))
    return EXIT_OK


def cmd_dickson_joker(args) -> int:
    if args.k not in (0, 1, 2):
        raise UsageError("--k must be 0, 1 or 2")
    q, cert = dickson.joker_quotient(args.k)
    lines = [
        f"quotient of reduced DI({args.k + 2}) through degree {6 << args.k}",
        f"removed classes: {' '.join(dickson.JOKER_QUOTIENT_CLASSES[args.k])}",
        f"isomorphic to suspend(double(J,{args.k}), {2 << args.k}): {cert is not None}",
    ]
    if cert is not None:
        for d in q.degrees:
            lines.append(f"certificate degree {d}: {' '.join(q.names[d])} -> {cert[d].to_lists()}")
    _write(args.output, q.to_text(comment="\n".join(lines)))
    return EXIT_OK if cert is not None else EXIT_FAILED


def cmd_dickson_ymodule(args) -> int:
    y = dickson.build_Y_module()
    names = " ".join(n for d in y.degrees for n in y.names[d])
    _write(args.output, y.to_text(comment=f"reduced DI(4) through degree 24 modulo x8^3\nclasses: {names}"))
    return EXIT_OK


# --------------------------------------------------------------------------
# ext, chart, sseq


def cmd_ext_compute(args) -> int:
    algebra = _algebra(args.algebra, SubalgebraSpec(2))
    if algebra.is_full:
        raise UsageError("ext compute needs a finite algebra A(n)")
    m = _read_module(args.input)
    shift = 0
    if args.dual:
        m, shift = fpmodule.dual(m)
    m = fpmodule.restrict(m, algebra.level)
    if m.lo is not None and m.lo != 0 and not args.dual:
        shift = m.lo
        m = fpmodule.suspend(m, -m.lo)
    try:
        res = extres.minimal_resolution(m, args.max_s, args.max_t)
    except extres.ResolutionLimitError as exc:
        print(f"resource bound exceeded: {exc}", file=sys.stderr)
        return EXIT_FAILED
    chart = extres.ext_chart(res, with_products=args.products, shift=shift)
    _write(args.output, chart.to_tsv())
    return EXIT_OK


def read_chart_tsv(text: str):
    """Parse chart or page TSV into ``(shift, classes, edges, differentials)``.

    Classes are ``(s, t, idx)`` in the file's own grading; pages already use
    true degrees and report shift 0.
    """
    shifts = []
    classes, edges, diffs = [], [], []
    is_page = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("shift="):
                    shifts.append(int(tok[6:]))
                if tok.startswith("page="):
                    is_page = True
            continue
        parts = line.split("\t")
        try:
            if parts[0].startswith("h"):
                i = int(parts[0][1:])
                src = tuple(int(x) for x in parts[1].split(","))
                tgt = tuple(int(x) for x in parts[2].split(","))
                edges.append((i, src, tgt))
            elif parts[0].startswith("d"):
                diffs.append((int(parts[0][1:]), parts[1], parts[2]))
            else:
                s, t, idx = (int(x) for x in parts)
                classes.append((s, t, idx))
        except (ValueError, IndexError):
            raise UsageError(f"line {lineno}: malformed chart row {line!r}") from None
    shift = 0 if is_page or not shifts else shifts[0]
    return shift, classes, edges, diffs


UNIT = 24
MARGIN = 24


def render_svg(text: str) -> str:
    shift, classes, edges, _ = read_chart_tsv(text)
    if not classes:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="48" height="48"></svg>\n'
    crowd: dict[tuple[int, int], int] = {}
    for s, t, _ in classes:
        crowd[(s, t)] = crowd.get((s, t), 0) + 1
    stems = [t - s - shift for s, t, _ in classes]
    lo, hi = min(stems), max(stems)
    top = max(s for s, _, _ in classes)
    width = (hi - lo) * UNIT + 2 * MARGIN
    height = top * UNIT + 2 * MARGIN

    def pos(s, t, idx):
        n = crowd[(s, t)]
        dx = (idx - (n - 1) / 2) * 5
        x = MARGIN + (t - s - shift - lo) * UNIT + dx
        y = height - MARGIN - s * UNIT
        return f"{x:g}", f"{y:g}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    for stem in range(lo, hi + 1):
        x = MARGIN + (stem - lo) * UNIT
        out.append(f'<text x="{x}" y="{height - 6}" font-size="8" text-anchor="middle">{stem}</text>')
    for i, src, tgt in edges:
        if crowd.get(src[:2], 0) <= src[2] or crowd.get(tgt[:2], 0) <= tgt[2]:
            continue
        x1, y1 = pos(*src)
        x2, y2 = pos(*tgt)
        out.append(f'<line class="h{i}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="black" stroke-width="1"/>')
    for s, t, idx in classes:
        x, y = pos(s, t, idx)
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_chart_render(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    _write(args.output, render_svg(text))
    return EXIT_OK


def cmd_sseq_run(args) -> int:
    data = sseq.obstruction_argument(args.max_s, args.max_t)
    for st in data.steps:
        print(f"{'PASS' if st.passed else 'FAIL'}  {st.name}" + (f"  [{st.detail}]" if st.detail else ""))
    if args.output and data.page3 is not None:
        Path(args.output).write_text(data.page3.to_tsv())
    return EXIT_OK if all(st.passed for st in data.steps) else EXIT_FAILED


def cmd_verify(args) -> int:
    results = claims.run_all(seed=args.seed)
    ok = True
    for r in results:
        status = "PASS" if r.passed and r.within_limit else "FAIL"
        ok &= status == "PASS"
        limit = "" if r.limit == float("inf") else f" / {r.limit:g}s"
        print(f"{status}  {r.number:>2}. {r.title:<24} {r.seconds:7.2f}s{limit}  {r.detail}")
    print(f"note: {claims.DOUBLING_NOTE}")
    return EXIT_OK if ok else EXIT_FAILED


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jokerkit", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    mod = groups.add_parser("module", help="build and transform module files").add_subparsers(dest="command", required=True)
    b = mod.add_parser("build", help="write a preset module; the preset defaults to the file stem")
    b.add_argument("output")
    b.add_argument("--preset")
    b.add_argument("--bound", type=int)
    b.set_defaults(func=cmd_module_build)
    d = mod.add_parser("dual", help="dual module, normalized to start in degree 0")
    d.add_argument("input")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_module_dual)
    db = mod.add_parser("double", help="iterated double")
    db.add_argument("input")
    db.add_argument("--k", type=int, default=1)
    db.add_argument("-o", "--output")
    db.set_defaults(func=cmd_module_double)
    sg = mod.add_parser("sigma", help="print the unstable degree")
    sg.add_argument("input")
    sg.set_defaults(func=cmd_module_sigma)
    sp = mod.add_parser("split", help="split into degrees <= cut and > cut")
    sp.add_argument("input")
    sp.add_argument("--cut", type=int, required=True)
    sp.add_argument("--algebra")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_module_split)
    iso = mod.add_parser("iso", help="decide isomorphism of two modules")
    iso.add_argument("first")
    iso.add_argument("second")
    iso.add_argument("--algebra")
    iso.set_defaults(func=cmd_module_iso)

    dk = groups.add_parser("dickson", help="Dickson invariants").add_subparsers(dest="command", required=True)
    g = dk.add_parser("gens", help="print the Dickson generators as polynomials")
    g.add_argument("--n", type=int, required=True)
    g.set_defaults(func=cmd_dickson_gens)
    sk = dk.add_parser("skeleton", help="reduced DI(n) through a degree bound")
    sk.add_argument("--n", type=int, required=True)
    sk.add_argument("--bound", type=int, required=True)
    sk.add_argument("-o", "--output")
    sk.set_defaults(func=cmd_dickson_skeleton)
    jq = dk.add_parser("joker", help="Joker quotient of a skeleton with its certificate")
    jq.add_argument("--k", type=int, required=True)
    jq.add_argument("-o", "--output")
    jq.set_defaults(func=cmd_dickson_joker)
    ym = dk.add_parser("ymodule", help="reduced DI(4) through degree 24 modulo x8^3")
    ym.add_argument("-o", "--output")
    ym.set_defaults(func=cmd_dickson_ymodule)

    ext = groups.add_parser("ext", help="Ext charts").add_subparsers(dest="command", required=True)
    ec = ext.add_parser("compute", help="resolve a module and write its chart TSV")
    ec.add_argument("input")
    ec.add_argument("--algebra", default="A(2)")
    ec.add_argument("--max-s", type=int, default=extres.DEFAULT_S_MAX)
    ec.add_argument("--max-t", type=int, default=extres.DEFAULT_T_MAX)
    ec.add_argument("--products", action="store_true")
    ec.add_argument("--dual", action="store_true", help="resolve the dual module (shift recorded)")
    ec.add_argument("-o", "--output")
    ec.set_defaults(func=cmd_ext_compute)

    ch = groups.add_parser("chart", help="chart rendering").add_subparsers(dest="command", required=True)
    cr = ch.add_parser("render", help="render chart or page TSV as SVG")
    cr.add_argument("input")
    cr.add_argument("-o", "--output")
    cr.set_defaults(func=cmd_chart_render)

    ss = groups.add_parser("sseq", help="spectral sequence pages").add_subparsers(dest="command", required=True)
    sr = ss.add_parser("run", help="replay the obstruction argument for the rank-4 Dickson module")
    sr.add_argument("--max-s", type=int, default=10)
    sr.add_argument("--max-t", type=int, default=34)
    sr.add_argument("-o", "--output", help="write the E_3 page TSV here")
    sr.set_defaults(func=cmd_sseq_run)

    v = groups.add_parser("verify", help="run every acceptance check and print a table")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
