"""Command-line front end: ``cardbin {binarize,eval,gen,sweep}``.

Exit status is 0 on success, 1 when processing fails and 2 on usage errors.
``CARDBIN_CONFIG`` names a default config file when ``--config`` is absent.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from .config import ConfigError, PipelineConfig, load_config
from .evaluation import (Annotation, AnnotationError, EmptyScore, accuracy,
                         load_annotations, save_annotations, score)
from .imageio import PNMError, load_image, resize_nearest, save_binary, save_gray
from .pipeline import process_card
from .regions import class_overlay
from .synth import SpecError, generate_card, load_spec

TABLE3_RESOLUTIONS = "640x480,800x600,1024x768,1182x886,1672x1254,2048x1536"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _resolutions(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        w, sep, h = item.strip().lower().partition("x")
        try:
            if not sep:
                raise ValueError
            size = int(w), int(h)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad resolution {item!r}, expected WxH") from None
        if min(size) < 1:
            raise argparse.ArgumentTypeError(f"bad resolution {item!r}")
        out.append(size)
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cardbin", description="Business-card binarization pipeline.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("binarize", help="binarize one image")
    b.add_argument("input")
    b.add_argument("-o", "--output", required=True, help="output bitmap (PBM)")
    b.add_argument("--overlay", help="write a per-class gray overlay (PGM)")
    b.add_argument("--config")
    b.add_argument("--report", help="write per-stage '<stage> <ms> <peak_bytes>' lines")
    b.add_argument("--skew-log", help="write per-region skew diagnostics (TSV)")

    e = sub.add_parser("eval", help="score component classification")
    e.add_argument("input")
    e.add_argument("--truth", required=True, help="annotation file")
    e.add_argument("--config")

    g = sub.add_parser("gen", help="synthesize an annotated card")
    g.add_argument("--spec", required=True, help="JSON card spec")
    g.add_argument("--seed", required=True, type=int)
    g.add_argument("-o", "--output", required=True, help="output graymap (PGM)")
    g.add_argument("-a", "--annotations", required=True)

    s = sub.add_parser("sweep", help="time the pipeline over several resolutions")
    s.add_argument("input")
    s.add_argument("--resolutions", type=_resolutions, default=_resolutions(TABLE3_RESOLUTIONS))
    s.add_argument("--truth", help="annotations at the input's resolution")
    s.add_argument("--config")
    return p


def _config(path: str | None) -> PipelineConfig:
    path = path or os.environ.get("CARDBIN_CONFIG")
    return load_config(path) if path else PipelineConfig()


def _fmt(x) -> str:
    return "" if x is None else f"{x:.6f}"


def _skew_rows(result) -> list[str]:
    rows = ["region\tsource\talpha\tbeta\tgamma\talpha_top\tbeta_top\tgamma_top\tangle"]
    for rec in result.text_regions:
        s = rec.skew
        bottom = s.bottom or (None, None, None)
        top = s.top or (None, None, None)
        rows.append("\t".join([str(rec.component.label), s.source.value,
                               *map(_fmt, bottom), *map(_fmt, top), _fmt(s.angle)]))
    return rows


def cmd_binarize(args) -> int:
    config = _config(args.config)
    image = load_image(args.input)
    result = process_card(image, config)
    save_binary(result.binary, args.output)
    if args.overlay:
        save_gray(class_overlay(image.shape, result.components, result.classes), args.overlay)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.writelines(r.line() + "\n" for r in result.reports)
    if args.skew_log:
        with open(args.skew_log, "w", encoding="utf-8") as fh:
            fh.writelines(row + "\n" for row in _skew_rows(result))
    return 0


def cmd_eval(args) -> int:
    config = _config(args.config)
    image = load_image(args.input)
    truth = load_annotations(args.truth)
    result = process_card(image, config, trace_memory=False)
    counts = score(result.components, result.classes, truth)
    print("bb\tbt\ttb\ttt\ttotal\taccuracy")
    acc = accuracy(counts) if counts.total else float("nan")
    print(f"{counts.bb}\t{counts.bt}\t{counts.tb}\t{counts.tt}\t{counts.total}\t{acc:.2f}")
    return 0


def cmd_gen(args) -> int:
    spec = load_spec(args.spec)
    image, annotations = generate_card(spec, args.seed)
    save_gray(image, args.output)
    save_annotations(annotations, args.annotations)
    return 0


def scale_annotations(annotations, src_size, dst_size) -> list[Annotation]:
    (sw, sh), (dw, dh) = src_size, dst_size
    out = []
    for a in annotations:
        x0, y0 = a.x * dw // sw, a.y * dh // sh
        x1 = math.ceil((a.x + a.w) * dw / sw)
        y1 = math.ceil((a.y + a.h) * dh / sh)
        out.append(Annotation(a.kind, x0, y0, max(1, x1 - x0), max(1, y1 - y0)))
    return out


def cmd_sweep(args) -> int:
    config = _config(args.config)
    image = load_image(args.input)
    truth = load_annotations(args.truth) if args.truth else None
    h, w = image.shape
    print("resolution\tmegapixels\ttime_ms\tpeak_bytes\tpeak_ratio\tcomponents\ttext\taccuracy")
    for rw, rh in args.resolutions:
        scaled = resize_nearest(image, rw, rh)
        result = process_card(scaled, config)
        total_ms = sum(r.wall_ms for r in result.reports)
        acc = ""
        if truth is not None:
            counts = score(result.components, result.classes,
                           scale_annotations(truth, (w, h), (rw, rh)))
            acc = f"{accuracy(counts):.2f}" if counts.total else "nan"
        print(f"{rw}x{rh}\t{rw * rh / 1e6:.2f}\t{total_ms:.1f}\t{result.peak_bytes}\t"
              f"{result.peak_bytes / scaled.nbytes:.2f}\t{len(result.regions)}\t"
              f"{len(result.text_regions)}\t{acc}")
    return 0


COMMANDS = {"binarize": cmd_binarize, "eval": cmd_eval, "gen": cmd_gen, "sweep": cmd_sweep}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (OSError, PNMError, ConfigError, AnnotationError, SpecError, EmptyScore) as exc:
        print(f"cardbin {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
