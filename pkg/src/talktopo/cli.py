"""Command line entry point.

Eight subcommands cover the pipeline stages individually and end to end:

  distances    embedding CSV -> pairwise distance matrix CSV
  persistence  embedding CSV -> persistence diagram CSV
  piv          diagram CSV -> persistence image CSV (+ config sidecar)
  wasserstein  two diagram CSVs -> distance printed on one line
  train        manifest -> cross-validation report only
  pipeline     manifest -> per-talk artifacts, plots, and report
  synth        write a synthetic corpus and print its manifest path
  plot         diagram or image CSV -> standalone SVG

Shared flags (--metric, --threads, --seed, --config) are accepted by
every subcommand and used where they apply. Exit codes: 0 success,
1 usage error, 2 data error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DataError, ResourceLimitError, TrainingError
from .filtration import build_filtration
from .io import (
    diagram_csv_text,
    matrix_csv_text,
    read_diagram_csv,
    read_embedding_csv,
    read_json,
    write_diagram_csv,
    write_matrix_csv,
    write_piv_csv,
)
from .metrics import METRICS, PointCloud, pairwise_distances
from .persistence import compute_persistence
from .pimage import PivConfig, rasterize
from .pipeline import generate_synthetic_corpus, run_pipeline
from .plots import plot_diagram_svg, plot_piv_svg
from .wasserstein import wasserstein

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RESOURCE = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_piv_config(args) -> PivConfig:
    if not args.config:
        return PivConfig()
    data = read_json(args.config)
    if not isinstance(data, dict):
        raise DataError(f"{args.config}: config must be a JSON object")
    try:
        return PivConfig.from_json_dict(data)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{args.config}: {exc}") from exc


def _emit(text: str, out) -> None:
    if out:
        from .io import atomic_write_text

        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _cmd_distances(args) -> int:
    cloud = PointCloud(points=read_embedding_csv(args.embedding), id=Path(args.embedding).stem)
    dm = pairwise_distances(cloud, metric=args.metric)
    _emit(matrix_csv_text(dm.entries), args.out)
    return EXIT_OK


def _cmd_persistence(args) -> int:
    cloud = PointCloud(points=read_embedding_csv(args.embedding), id=Path(args.embedding).stem)
    dm = pairwise_distances(cloud, metric=args.metric)
    filt = build_filtration(dm, max_hom_dim=args.max_hom_dim, threshold=args.threshold)
    diagram = compute_persistence(filt)
    _emit(diagram_csv_text(diagram), args.out)
    return EXIT_OK


def _cmd_piv(args) -> int:
    diagram = read_diagram_csv(args.diagram)
    image = rasterize(diagram, dim=args.dim, cfg=_load_piv_config(args))
    if args.out:
        write_piv_csv(image, args.out)
    else:
        sys.stdout.write(matrix_csv_text(image.values))
    return EXIT_OK


def _cmd_wasserstein(args) -> int:
    d1 = read_diagram_csv(args.diagram_a)
    d2 = read_diagram_csv(args.diagram_b)
    print(repr(wasserstein(d1, d2, p=args.p, dim=args.dim)))
    return EXIT_OK


def _cmd_train(args) -> int:
    artifacts = run_pipeline(
        args.manifest, out_dir=args.out, threads=args.threads, write_talk_artifacts=False
    )
    print(artifacts.report_json)
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    artifacts = run_pipeline(args.manifest, out_dir=args.out, threads=args.threads)
    print(artifacts.report_json)
    return EXIT_OK


def _cmd_synth(args) -> int:
    manifest = generate_synthetic_corpus(args.n_talks, args.seed, args.out)
    print(manifest)
    return EXIT_OK


def _cmd_plot(args) -> int:
    if args.kind == "diagram":
        plot_diagram_svg(read_diagram_csv(args.input), args.output)
    else:
        from .io import read_piv_csv

        plot_piv_svg(read_piv_csv(args.input), args.output)
    return EXIT_OK


def build_parser() -> _Parser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--metric", choices=METRICS, default="angular",
        help="dissimilarity for embedding clouds (default: angular)",
    )
    shared.add_argument(
        "--threads", type=int, default=1,
        help="worker bound for per-talk computations (default: 1)",
    )
    shared.add_argument("--seed", type=int, default=0, help="root random seed (default: 0)")
    shared.add_argument(
        "--config", metavar="JSON",
        help="JSON file of persistence-image settings (piv subcommand)",
    )

    parser = _Parser(prog="talktopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("distances", parents=[shared], help="embedding CSV to distance matrix CSV")
    p.add_argument("embedding", help="sentence embedding CSV, one row per sentence")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=_cmd_distances)

    p = sub.add_parser("persistence", parents=[shared], help="embedding CSV to diagram CSV")
    p.add_argument("embedding")
    p.add_argument("--out", help="output diagram CSV (default: stdout)")
    p.add_argument("--max-hom-dim", type=int, default=1)
    p.add_argument(
        "--threshold", type=float, default=None,
        help="Rips truncation scale (default: auto, the largest distance)",
    )
    p.set_defaults(func=_cmd_persistence)

    p = sub.add_parser("piv", parents=[shared], help="diagram CSV to image CSV")
    p.add_argument("diagram")
    p.add_argument("--out", help="output image CSV; a .json config sidecar lands next to it")
    p.add_argument("--dim", type=int, default=1, help="homology dimension to rasterize")
    p.set_defaults(func=_cmd_piv)

    p = sub.add_parser("wasserstein", parents=[shared], help="distance between two diagram CSVs")
    p.add_argument("diagram_a")
    p.add_argument("diagram_b")
    p.add_argument("--p", type=float, default=1.0, help="Wasserstein order (default: 1)")
    p.add_argument("--dim", type=int, default=0, help="homology dimension to compare")
    p.set_defaults(func=_cmd_wasserstein)

    p = sub.add_parser("train", parents=[shared], help="cross-validation report for a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="output directory (default: <manifest dir>/run)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("pipeline", parents=[shared], help="full run: artifacts, plots, report")
    p.add_argument("manifest")
    p.add_argument("--out", help="output directory (default: <manifest dir>/run)")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("synth", parents=[shared], help="write a synthetic corpus")
    p.add_argument("n_talks", type=int)
    p.add_argument("--out", required=True, help="corpus directory to create")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("plot", parents=[shared], help="render a diagram or image as SVG")
    p.add_argument("kind", choices=("diagram", "piv"))
    p.add_argument("input", help="diagram CSV or image CSV (with its sidecar)")
    p.add_argument("output", help="SVG path to write")
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DataError, TrainingError, OSError) as exc:
        print(f"talktopo: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ResourceLimitError, MemoryError) as exc:
        print(f"talktopo: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"talktopo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
