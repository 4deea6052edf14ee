"""Batch command-line front end: detect | mine | layout | similarity | serve.

All outputs are deterministic for fixed flags and seed (sorted JSON keys,
6-decimal floats), so runs are golden-file testable. Exit codes: 0 success,
1 runtime or domain failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .encoding import DEFAULT_TAU, encode_path, project_to_level, rle_encode, to_transition_string
from .gaze_csv import GazeCsvError, parse_gaze_csv
from .layout import LayoutParams, PatternSelection, assign_hues, build_graph, layout_to_json, run_layout
from .mining import build_table, filter_by_threshold, similarity_matrix, table_to_json
from .model import AoiTree, Stimulus, cut_at_level, load_tree, tree_to_json, validate_tree


def _fail(message: str, code: int = 1) -> int:
    print(f"gazemine: {message}", file=sys.stderr)
    return code


def _require_files(*paths: str) -> int | None:
    for path in paths:
        if not os.path.exists(path):
            return _fail(f"no such file: {path}", 2)
    return None


def _load_stimulus(path: str) -> Stimulus:
    from PIL import Image

    img = Image.open(path).convert("RGB")
    return Stimulus(img.width, img.height, np.asarray(img, dtype=np.uint8))


def _dump_json(data: dict, out: str | None) -> None:
    text = json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _checked_tree(path: str) -> AoiTree:
    tree = load_tree(path)
    violations = validate_tree(tree)
    if violations:
        raise ValueError(f"invalid AOI tree {path}: {'; '.join(violations)}")
    return tree


def _level_codes(gaze_path: str, tree: AoiTree, level: int) -> dict[str, object]:
    """Run-length codes per participant at the chosen level."""
    with open(gaze_path, "r", encoding="utf-8") as fh:
        paths = parse_gaze_csv(fh.read())
    return {
        participant: project_to_level(
            rle_encode(encode_path(paths[participant], tree)), tree, level)
        for participant in sorted(paths)
    }


def _transition_strings(gaze_path: str, tree: AoiTree, level: int, tau: int) -> dict[str, str]:
    return {
        participant: to_transition_string(rle, tau)
        for participant, rle in _level_codes(gaze_path, tree, level).items()
    }


def cmd_detect(args: argparse.Namespace) -> int:
    from .detect import DetectionParams, detect_aois

    missing = _require_files(args.image)
    if missing is not None:
        return missing
    try:
        stimulus = _load_stimulus(args.image)
        params = DetectionParams(z=args.cell_size, g=args.colors)
        tree = detect_aois(stimulus, params)
        if args.debug_png:
            from .detect import arrange, fill_to_fixpoint, fit_rectangles, mosaic_and_quantize
            from .render import debug_detection_png

            grid = fill_to_fixpoint(mosaic_and_quantize(stimulus, params))
            candidates = fit_rectangles(grid)
            final = arrange(candidates, z=params.z, stimulus_size=(stimulus.width, stimulus.height))
            debug_detection_png(grid, [c.rect for c in candidates], final, params.z, args.debug_png)
    except ValueError as exc:
        return _fail(str(exc))
    _dump_json(tree_to_json(tree), args.output)
    return 0


def cmd_mine(args: argparse.Namespace) -> int:
    missing = _require_files(args.gaze, args.aois)
    if missing is not None:
        return missing
    try:
        tree = _checked_tree(args.aois)
        level = args.level if args.level is not None else max(tree.depth, 1)
        codes = _level_codes(args.gaze, tree, level)
        strings = {p: to_transition_string(rle, args.tau) for p, rle in codes.items()}
        table = build_table(strings, args.n, level)
        if args.more_than is not None:
            table = filter_by_threshold(table, "more", args.more_than)
        if args.less_than is not None:
            table = filter_by_threshold(table, "less", args.less_than)
        matrix = similarity_matrix(table) if len(table.participants) >= 2 else None
    except (ValueError, GazeCsvError) as exc:
        return _fail(str(exc))
    out = table_to_json(table, matrix)
    out["rle"] = {p: rle.render() for p, rle in codes.items()}
    out["alphabet"] = {n.char: n.id for n in sorted(tree.leaves(), key=lambda n: n.char)}
    _dump_json(out, args.output)
    return 0


def cmd_similarity(args: argparse.Namespace) -> int:
    missing = _require_files(args.gaze, args.aois)
    if missing is not None:
        return missing
    try:
        tree = _checked_tree(args.aois)
        level = args.level if args.level is not None else max(tree.depth, 1)
        strings = _transition_strings(args.gaze, tree, level, args.tau)
        if len(strings) < 2:
            raise ValueError("similarity needs at least 2 participants")
        matrix = similarity_matrix(build_table(strings, args.n, level))
    except (ValueError, GazeCsvError) as exc:
        return _fail(str(exc))
    _dump_json(
        {
            "participants": list(matrix.participants),
            "values": [[round(v, 6) for v in row] for row in matrix.values],
            "argmin": list(matrix.argmin),
            "argmax": list(matrix.argmax),
        },
        args.output,
    )
    return 0


def cmd_layout(args: argparse.Namespace) -> int:
    from .render import render_svg

    missing = _require_files(args.table, args.aois)
    if missing is not None:
        return missing
    ids = [p for p in (args.patterns or "").split(",") if p]
    if not ids:
        return _fail("empty pattern selection (--patterns)", 2)
    try:
        with open(args.table, "r", encoding="utf-8") as fh:
            table = json.load(fh)
        tree = _checked_tree(args.aois)
        level = int(table.get("level") or max(tree.depth, 1))
        totals = {row["chars"]: int(row["total"]) for row in table.get("patterns", [])}
        unknown = [p for p in ids if p not in totals]
        if unknown:
            raise ValueError(f"unknown pattern ids: {', '.join(unknown)}")
        selections = [PatternSelection(id=p, chars=p, weight=totals[p]) for p in ids]
        graph = run_layout(
            build_graph(selections, tree, level, seed=args.seed),
            LayoutParams(seed=args.seed, iterations=args.iterations),
        )
        stimulus = _load_stimulus(args.image) if args.image else None
        width = stimulus.width if stimulus else max(e.rect.right for e in cut_at_level(tree, level))
        height = stimulus.height if stimulus else max(e.rect.bottom for e in cut_at_level(tree, level))
        svg = render_svg(width, height, cut_at_level(tree, level), assign_hues(tree), graph, stimulus)
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
        if args.json:
            _dump_json(layout_to_json(graph), args.json)
    except (ValueError, OSError) as exc:
        return _fail(str(exc))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    if os.path.exists(args.data_dir) and not os.path.isdir(args.data_dir):
        return _fail(f"data dir is not a directory: {args.data_dir}")
    try:
        app = create_app(args.data_dir)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        return _fail(f"server failed: {exc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazemine", description=__doc__)
    parser.add_argument("--version", action="version", version=f"gazemine {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect AOIs on a stimulus image")
    p.add_argument("image")
    p.add_argument("--cell-size", type=int, default=8, help="mosaic cell size z in pixels")
    p.add_argument("--colors", type=int, default=4, help="palette size g after color reduction")
    p.add_argument("-o", "--output", default=None, help="AOI JSON path (default stdout)")
    p.add_argument("--debug-png", default=None, help="dump quantized grid and rects as PNG")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("mine", help="mine N-gram transition patterns from gaze records")
    p.add_argument("gaze", help="gaze CSV (participant,t,x,y)")
    p.add_argument("aois", help="AOI hierarchy JSON")
    p.add_argument("--level", type=int, default=None, help="hierarchy level k (default: finest)")
    p.add_argument("--n", type=int, default=2, help="pattern length N")
    p.add_argument("--tau", type=int, default=DEFAULT_TAU, help="minimum dwell in samples")
    p.add_argument("--more-than", type=int, default=None, help="keep patterns with total > T")
    p.add_argument("--less-than", type=int, default=None, help="keep patterns with total < T")
    p.add_argument("-o", "--output", default=None, help="table JSON path (default stdout)")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("similarity", help="cosine similarity matrix between participants")
    p.add_argument("gaze")
    p.add_argument("aois")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--tau", type=int, default=DEFAULT_TAU)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("layout", help="render selected patterns as an SVG transition graph")
    p.add_argument("table", help="pattern table JSON from mine")
    p.add_argument("aois", help="AOI hierarchy JSON")
    p.add_argument("--patterns", required=True, help="comma-separated pattern ids, e.g. AB,BC")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=300)
    p.add_argument("--image", default=None, help="stimulus PNG to embed as underlay")
    p.add_argument("-o", "--output", required=True, help="SVG output path")
    p.add_argument("--json", default=None, help="also write the layout JSON here")
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("serve", help="run the HTTP analysis service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("PORT", "8000")))
    p.add_argument("--data-dir", default=os.environ.get("DATA_DIR", "./data"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
