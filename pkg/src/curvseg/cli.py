"""Batch command-line front end: segmentation, corpus export/eval, service."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .energy import AttractionMode, DEFAULT_LAMBDA
from .lattice import load_image, load_seeds, seeds_from_scribbles
from .segmenter import SegmentationParams, format_report, save_result, segment
from .synthcorpus import default_cases, dice, export_corpus, load_exported_case


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, default=2.0, help="curvature exponent")
    parser.add_argument("--beta", type=float, default=20.0, help="contrast strength")
    parser.add_argument(
        "--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA,
        help="attraction strength",
    )
    parser.add_argument(
        "--mode", choices=["magnitude", "signed"], default="magnitude",
        help="attraction weight mode",
    )
    parser.add_argument("--no-probe", action="store_true", help="disable probing")
    parser.add_argument(
        "--fallback", choices=["bg", "fg"], default="bg",
        help="fill policy for unlabeled pixels",
    )


def _params_from_args(args) -> SegmentationParams:
    return SegmentationParams(
        p=args.p,
        beta=args.beta,
        lam=args.lam,
        mode=AttractionMode(args.mode),
        probing=not args.no_probe,
        fallback=args.fallback,
    )


def _load_seeds_any(path: Path):
    """Seed file: PGM/PNG mask, or scribble JSON shared with the service."""
    if path.suffix.lower() == ".json":
        spec = json.loads(path.read_text())
        strokes = [
            (s["class"], s.get("radius", 0.0), s["points"]) for s in spec["strokes"]
        ]
        return strokes
    return load_seeds(path)


def run_segment(args) -> int:
    image = load_image(args.image)
    seeds = _load_seeds_any(Path(args.seeds))
    if isinstance(seeds, list):
        seeds = seeds_from_scribbles(image.width, image.height, seeds)
    if (seeds.width, seeds.height) != (image.width, image.height):
        raise ValueError("seed mask dimensions do not match image")
    result = segment(image, seeds, _params_from_args(args))
    save_result(result, args.out)
    r = result.report
    print(
        f"energy={r.energy_of_completion:.9g} lower_bound={r.lower_bound:.9g} "
        f"unlabeled={r.unlabeled_count} probes={r.probes_run} "
        f"runtime_ms={r.runtime_ms:.3f}"
    )
    return 0


def run_corpus_export(args) -> int:
    names = export_corpus(args.dir)
    for name in names:
        print(f"exported {name}")
    return 0


def _eval_case(case_dir: Path, params: SegmentationParams):
    image, seeds, truth = load_exported_case(case_dir)
    result = segment(image, seeds, params)
    return (
        f"{case_dir.name} dice={dice(result.mask, truth):.4f} "
        f"unlabeled={result.report.unlabeled_count} "
        f"energy={result.report.energy_of_completion:.6g} "
        f"ms={result.report.runtime_ms:.1f}"
    )


def run_corpus_eval(args) -> int:
    root = Path(args.dir)
    case_dirs = sorted(
        d for d in root.iterdir() if d.is_dir() and (d / "image.pgm").exists()
    ) if root.is_dir() else []
    if not case_dirs:
        print(f"error: no exported cases under {root}", file=sys.stderr)
        return 1
    params = _params_from_args(args)
    workers = int(os.environ.get("CURVSEG_THREADS", "0")) or min(4, len(case_dirs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        lines = list(pool.map(lambda d: _eval_case(d, params), case_dirs))
    for line in lines:  # buffered, emitted in case-name order
        print(line)
    return 0


def run_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvseg",
        description="Seeded segmentation by contrast-weighted curvature minimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment one image")
    seg.add_argument("--image", required=True)
    seg.add_argument("--seeds", required=True, help="PGM/PNG seed mask or scribble JSON")
    seg.add_argument("--out", required=True, help="output mask PNG path")
    _add_param_flags(seg)
    seg.set_defaults(func=run_segment)

    corpus = sub.add_parser("corpus", help="control corpus tools")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)
    exp = corpus_sub.add_parser("export", help="write bundled cases to a directory")
    exp.add_argument("--dir", required=True)
    exp.set_defaults(func=run_corpus_export)
    ev = corpus_sub.add_parser("eval", help="segment every exported case")
    ev.add_argument("--dir", required=True)
    _add_param_flags(ev)
    ev.set_defaults(func=run_corpus_eval)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8321)
    serve.add_argument("--frontend", default=None, help="static UI bundle directory")
    serve.set_defaults(func=run_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors
        return int(exc.code or 0)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
