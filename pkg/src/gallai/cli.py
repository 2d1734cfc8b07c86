"""Command-line front end.

Reports go to stdout as JSON (one object, or one object per line for
families); diagnostics go to stderr.  Exit status 0 means success, 1 a
failed verification and 2 a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Iterable, TextIO

from gallai.construction import (
    delta_f,
    delta_f_choices,
    delta_t,
    gamma,
    iterate_m_prime,
    realizations,
    spec_from_json,
)
from gallai.decomposition import Signature, decompose
from gallai.errors import GallaiError, SchemaError
from gallai.mixed import from_json as mixed_from_json
from gallai.mixed import to_dot
from gallai.mixed import to_json as mixed_to_json
from gallai.multigraph import (
    ColoredMultigraph,
    Palette,
    from_json as graph_from_json,
    is_maximal,
    is_reduced,
    maximal_closure,
    rainbow_triangles,
    reduce,
    to_json as graph_to_json,
)
from gallai.oracle import completeness_check, enumerate_census, roundtrip_check

OK, FAILED, USAGE = 0, 1, 2


class InputError(Exception):
    pass


def dumps(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def emit(obj: object, out: TextIO) -> None:
    out.write(dumps(obj) + "\n")


def emit_lines(objs: Iterable[object], out: TextIO) -> int:
    count = 0
    for obj in objs:
        emit(obj, out)
        count += 1
    return count


def load_json(path: str) -> object:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from None


def load_graph(args: argparse.Namespace) -> ColoredMultigraph:
    return graph_from_json(load_json(args.input), palette=args.palette)


def load_mixed(obj: object, args: argparse.Namespace, extra_keys: tuple[str, ...] = ()):
    """Mixed graph from JSON; ``--palette`` fills in a missing palette."""
    if isinstance(obj, dict) and "palette" not in obj and args.palette is not None:
        obj = dict(obj, palette=list(args.palette.labels))
    return mixed_from_json(obj, extra_keys)


def palette_arg(text: str) -> Palette:
    try:
        return Palette.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def resolve_palette(args: argparse.Namespace) -> Palette:
    if args.palette is not None:
        return args.palette
    return Palette.letters(args.colors)


# ------------------------------------------------------------ subcommands


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    g = load_graph(args)
    tri = rainbow_triangles(g)
    lab = g.palette.labels
    emit({
        "gallai": not tri,
        "reduced": is_reduced(g),
        "maximal": is_maximal(g) if not tri else False,
        "rainbow_witnesses": [
            {"vertices": list(t.vertices), "colors": [lab[c] for c in t.witness]} for t in tri
        ],
    }, out)
    return OK


def cmd_reduce(args: argparse.Namespace, out: TextIO) -> int:
    emit(graph_to_json(reduce(load_graph(args)).graph), out)
    return OK


def cmd_maximalize(args: argparse.Namespace, out: TextIO) -> int:
    emit(graph_to_json(maximal_closure(load_graph(args))), out)
    return OK


def cmd_decompose(args: argparse.Namespace, out: TextIO) -> int:
    seq = decompose(load_graph(args))
    if args.dot:
        target = Path(args.dot)
        target.mkdir(parents=True, exist_ok=True)
        for lvl, m in enumerate(seq.levels):
            (target / f"level{lvl}.dot").write_text(to_dot(m, f"M{lvl}"))
    emit(seq.to_json(), out)
    return OK


def cmd_construct(args: argparse.Namespace, out: TextIO) -> int:
    if args.family:
        pal = resolve_palette(args)
        family = iterate_m_prime(args.max_size, pal, args.depth, args.restrict_sigma)
        emit_lines((mixed_to_json(m) for m in family), out)
        return OK
    if args.input is None:
        raise InputError("construct needs an input file unless --family is given")
    obj = load_json(args.input)
    if args.all:
        base = load_mixed(obj, args, ("leaves", "signatures"))
        emit_lines((graph_to_json(gamma(s)) for s in realizations(base, args.max_size)), out)
        return OK
    emit(graph_to_json(gamma(spec_from_json(obj))), out)
    return OK


def cmd_delta_t(args: argparse.Namespace, out: TextIO) -> int:
    m = load_mixed(load_json(args.input), args)
    labels = [s for s in args.colors.split(",") if s]
    if len(labels) != 2 or labels[0] == labels[1]:
        raise InputError("--colors needs two distinct labels, e.g. A,B")
    emit_lines((mixed_to_json(t) for t in delta_t(m, m.palette.mask_of(labels), args.restrict_sigma)), out)
    return OK


def _signatures(raw: object, base) -> dict[tuple[int, int], Signature]:
    if not isinstance(raw, list):
        raise SchemaError("'signatures' must be a list")
    sigs = {}
    for entry in raw:
        if not isinstance(entry, dict) or set(entry) != {"edge", "map"}:
            raise SchemaError("signature entries need exactly 'edge' and 'map'")
        s, t = entry["edge"]
        sigs[(s, t)] = Signature.of({int(k): 1 << base.palette.index(v) for k, v in entry["map"].items()})
    return sigs


def cmd_delta_f(args: argparse.Namespace, out: TextIO) -> int:
    obj = load_json(args.input)
    if not isinstance(obj, dict) or not {"base", "trees"} <= set(obj) or set(obj) - {"base", "trees", "signatures"}:
        raise SchemaError("delta-f input needs 'base', 'trees' and optionally 'signatures'")
    base = load_mixed(obj["base"], args)
    if not isinstance(obj["trees"], list):
        raise SchemaError("'trees' must be a list")
    trees = [load_mixed(t, args) for t in obj["trees"]]
    if args.all:
        emit_lines((mixed_to_json(m) for m in delta_f_choices(base, trees)), out)
        return OK
    emit(mixed_to_json(delta_f(base, trees, _signatures(obj.get("signatures", []), base))), out)
    return OK


def cmd_enumerate(args: argparse.Namespace, out: TextIO) -> int:
    record = enumerate_census(args.vertices, resolve_palette(args), args.multiplicity_cap, args.override)
    emit(record.to_json(with_representatives=args.representatives), out)
    return OK


def cmd_verify_completeness(args: argparse.Namespace, out: TextIO) -> int:
    report = completeness_check(args.vertices, resolve_palette(args), args.override)
    emit(report.to_json(), out)
    return OK if report.ok else FAILED


def cmd_roundtrip(args: argparse.Namespace, out: TextIO) -> int:
    report = roundtrip_check(load_graph(args))
    emit(report.to_json(), out)
    return OK if report.ok else FAILED


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--palette", type=palette_arg, default=None,
                        help="comma-separated color labels, e.g. A,B,C")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="gallai", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("input", help="multigraph JSON file, or - for stdin")
        return p

    graph_cmd("check", "classify a multigraph").set_defaults(func=cmd_check)
    graph_cmd("reduce", "collapse isolated pairs").set_defaults(func=cmd_reduce)
    graph_cmd("maximalize", "add colors until maximal").set_defaults(func=cmd_maximalize)
    p = graph_cmd("decompose", "level sequence of mixed graphs")
    p.add_argument("--dot", metavar="DIR", help="also write one DOT file per level into DIR")
    p.set_defaults(func=cmd_decompose)
    graph_cmd("roundtrip", "rebuild a reduced maximal Gallai graph from its decomposition").set_defaults(
        func=cmd_roundtrip)

    p = sub.add_parser("construct", parents=[common], help="realize a construction spec")
    p.add_argument("input", nargs="?", help="construction spec, or a base mixed graph with --all")
    p.add_argument("--all", action="store_true", help="emit every realization of the base")
    p.add_argument("--max-size", type=int, default=5, help="vertex bound for --all and --family")
    p.add_argument("--family", action="store_true", help="emit the bounded mixed-graph family instead")
    p.add_argument("--depth", type=int, default=None, help="rounds for --family (default: --max-size)")
    p.add_argument("--colors", type=int, default=3, help="palette size when --palette is absent")
    p.add_argument("--restrict-sigma", action="store_true", help="only the generated class relation in new trees")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("delta-t", parents=[common], help="trees with a new root above a mixed graph")
    p.add_argument("input")
    p.add_argument("--colors", required=True, help="the two root colors, e.g. A,B")
    p.add_argument("--restrict-sigma", action="store_true", help="only the generated class relation")
    p.set_defaults(func=cmd_delta_t)

    p = sub.add_parser("delta-f", parents=[common], help="substitute rooted trees into a mixed graph")
    p.add_argument("input", help="JSON with 'base', 'trees' and 'signatures'")
    p.add_argument("--all", action="store_true", help="enumerate every admissible signature choice")
    p.set_defaults(func=cmd_delta_f)

    def oracle_cmd(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--vertices", type=int, required=True)
        p.add_argument("--colors", type=int, default=3, help="palette size when --palette is absent")
        p.add_argument("--override", action="store_true", help="ignore the default search bounds")
        return p

    p = oracle_cmd("enumerate", "census of small multigraphs")
    p.add_argument("--multiplicity-cap", type=int, default=2)
    p.add_argument("--representatives", action="store_true", help="include canonical representatives")
    p.set_defaults(func=cmd_enumerate)
    oracle_cmd("verify-completeness", "compare realizations with the census").set_defaults(
        func=cmd_verify_completeness)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "depth", 0) is None:
        args.depth = args.max_size
    try:
        return args.func(args, out)
    except (InputError, GallaiError, ValueError) as exc:
        print(f"gallai: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
