"""Command-line entry point.

Exit status: 0 success, 1 usage error, 2 data error. Diagnostics go to stderr;
results go to the ``--out`` file or stdout.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from .descriptor import OperatorParams, code_image
from .errors import ElbpError
from .evaluation import (
    Manifest,
    details_csv,
    evaluate,
    load_manifest,
    parse_manifest,
    results_csv,
    sweep_cell_size,
    sweep_range,
)
from .facemodel import build_face_model, save_model
from .imaging import add_noise, gen_texture, load_image, save_pgm
from .matcher import Gallery, identify

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("elbp")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(flag: str):
    def conv(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 1, got {v}")
        return v

    return conv


def _int_list(text: str) -> List[int]:
    """'4,6,8' or '4-20' or a mix like '1-3,5'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return out


def _topologies(text: str):
    out = []
    for part in text.split(","):
        try:
            x, y = (int(v) for v in part.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"topology {part!r} is not of the form X:Y")
        if x not in (1, 4, 9) or y not in (1, 4, 9):
            raise argparse.ArgumentTypeError(f"topology {part!r}: sizes must be 1, 4 or 9")
        out.append((x, y))
    return out


def _add_operator(p: argparse.ArgumentParser, with_range: bool = True):
    p.add_argument("--x", type=int, choices=(1, 4, 9), default=4, help="neighbour point-set size")
    p.add_argument("--y", type=int, choices=(1, 4, 9), default=9, help="central point-set size")
    if with_range:
        p.add_argument("--r", type=_positive("--r"), default=5, help="E-LBP range")


def _add_cell(p):
    p.add_argument("--cell", type=_positive("--cell"), default=10, help="cell size in pixels")


def _add_threads(p):
    p.add_argument("--threads", type=_positive("--threads"), default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elbp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("codes", help="dump the code map of an image as PGM")
    p.add_argument("--in", dest="input", required=True)
    _add_operator(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build-model", help="build and save a face model")
    p.add_argument("--in", dest="input", required=True)
    _add_operator(p)
    _add_cell(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("identify", help="rank gallery images against a probe image")
    p.add_argument("--gallery", required=True, help="TSV of path<TAB>subject[<TAB>split]")
    p.add_argument("--probe", required=True)
    p.add_argument("--top", type=_positive("--top"), default=5)
    _add_operator(p)
    _add_cell(p)
    _add_threads(p)

    p = sub.add_parser("evaluate", help="rank-1 accuracy on a manifest")
    p.add_argument("--manifest", required=True)
    _add_operator(p)
    _add_cell(p)
    p.add_argument("--out", help="results CSV (stdout if omitted)")
    p.add_argument("--details", help="also write per-probe CSV here")
    _add_threads(p)

    p = sub.add_parser("sweep-cell", help="accuracy as a function of cell size")
    p.add_argument("--manifest", required=True)
    _add_operator(p)
    p.add_argument("--sizes", type=_int_list, default=list(range(4, 21)))
    p.add_argument("--out")
    p.add_argument("--details")
    _add_threads(p)

    p = sub.add_parser("sweep-range", help="accuracy as a function of topology and range")
    p.add_argument("--manifest", required=True)
    p.add_argument("--topologies", type=_topologies, default=[(4, 4), (4, 9), (9, 4), (9, 9)])
    p.add_argument("--ranges", type=_int_list, default=list(range(1, 9)))
    _add_cell(p)
    p.add_argument("--out")
    p.add_argument("--details")
    _add_threads(p)

    p = sub.add_parser("gen-fixtures", help="write a synthetic gallery/probe dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subjects", type=_positive("--subjects"), default=20)
    p.add_argument("--size", type=_positive("--size"), default=64)
    p.add_argument("--noise", type=int, default=4, help="uniform probe noise amplitude")
    return parser


def _params(args) -> OperatorParams:
    return OperatorParams.create(args.x, args.y, args.r)


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_reports(reports, args) -> None:
    _emit(results_csv(reports), args.out)
    if args.details:
        _emit(details_csv(reports), args.details)


def _read_gallery(path: str) -> Manifest:
    base = os.path.dirname(path)
    lines = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            cols = line.rstrip("\r\n").split("\t")
            if len(cols) == 2:
                cols.append("gallery")
            lines.append("\t".join(cols))
    manifest = parse_manifest("\n".join(lines), base_dir=base)
    return Manifest(manifest.gallery)


def _gen_fixtures(args) -> None:
    os.makedirs(args.out, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    rows = []
    for k in range(args.subjects):
        subject = f"s{k:03d}"
        img = gen_texture(args.seed + k, "blobs", args.size, args.size)
        g_name, p_name = f"{subject}_gallery.pgm", f"{subject}_probe.pgm"
        save_pgm(img, os.path.join(args.out, g_name))
        save_pgm(add_noise(img, args.noise, rng), os.path.join(args.out, p_name))
        rows += [f"{g_name}\t{subject}\tgallery", f"{p_name}\t{subject}\tprobe"]
    with open(os.path.join(args.out, "manifest.tsv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def _dispatch(args) -> None:
    cmd = args.command
    if cmd == "codes":
        save_pgm(code_image(load_image(args.input), _params(args)).to_image(), args.out)
    elif cmd == "build-model":
        save_model(build_face_model(load_image(args.input), _params(args), args.cell), args.out)
    elif cmd == "identify":
        params = _params(args)
        gallery = Gallery()
        for e in _read_gallery(args.gallery).entries:
            gallery.add(e.subject_id, build_face_model(load_image(e.path), params, args.cell))
        probe = build_face_model(load_image(args.probe), params, args.cell)
        for i, (subject, score) in enumerate(identify(probe, gallery, args.threads)[: args.top], 1):
            sys.stdout.write(f"{i}\t{subject}\t{score:.6f}\n")
    elif cmd == "evaluate":
        report = evaluate(load_manifest(args.manifest), _params(args), args.cell, args.threads)
        _emit_reports([report], args)
    elif cmd == "sweep-cell":
        reports = sweep_cell_size(load_manifest(args.manifest), _params(args), args.sizes, args.threads)
        _emit_reports(reports, args)
    elif cmd == "sweep-range":
        reports = sweep_range(load_manifest(args.manifest), args.topologies, args.cell,
                              args.ranges, args.threads)
        _emit_reports(reports, args)
    elif cmd == "gen-fixtures":
        _gen_fixtures(args)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        _dispatch(args)
    except (ElbpError, OSError, ValueError) as exc:
        print(f"elbp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
