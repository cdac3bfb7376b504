"""Command-line interface: ingest, catalog, generate, realize, serve.

The cache root comes from --cache-root, the SCENGEN_CACHE environment
variable, or ./scengen-cache, in that order. Exit codes: 0 on
success, 1 on I/O problems, 2 on engine errors; diagnostics go to
stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import ScengenError, ValidationError
from .persist import Workspace, scenario_to_document
from .realize import DEFAULT_DT, realize_scenario, timeline_to_document
from .scenario import SamplerConfig, export_empty_subgraph, sample_scenario

ENV_CACHE_ROOT = "SCENGEN_CACHE"


def _default_cache_root() -> str:
    return os.environ.get(ENV_CACHE_ROOT, "scengen-cache")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cache-root", default=_default_cache_root(),
        help="cache directory (default: $SCENGEN_CACHE or ./scengen-cache)",
    )
    parser.add_argument(
        "--assets", default=None, help="asset catalog file (default: bundled catalog)"
    )


def _workspace(args: argparse.Namespace) -> Workspace:
    return Workspace(args.cache_root, args.assets)


def cmd_ingest(args: argparse.Namespace) -> int:
    workspace = _workspace(args)
    for source in args.sources:
        entry = workspace.ingest(source, spacing=args.spacing, target_length=args.target_length)
        meta = entry.metadata
        print(
            f"{entry.map_id}: junctions={meta.junction_count} "
            f"crosswalks={meta.crosswalk_count} traffic_lights={meta.traffic_light_count} "
            f"drivable={meta.total_drivable_length:.1f}m digest={entry.digest[:12]}"
        )
    return 0


def cmd_catalog(args: argparse.Namespace) -> int:
    workspace = _workspace(args)
    entries = workspace.entries()
    if not entries:
        print("cache is empty; run `scengen ingest <map.xodr>` first")
        return 0
    header = f"{'map':24} {'junctions':>9} {'crosswalks':>10} {'lights':>6} {'drivable [m]':>12}"
    print(header)
    print("-" * len(header))
    for entry in entries:
        meta = entry.metadata
        print(
            f"{entry.map_id:24} {meta.junction_count:>9} {meta.crosswalk_count:>10} "
            f"{meta.traffic_light_count:>6} {meta.total_drivable_length:>12.1f}"
        )
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    workspace = _workspace(args)
    bundles = workspace.bundles()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lo, hi = (int(x) for x in args.regions.split(":"))
    for i in range(args.count):
        config = SamplerConfig(
            seed=(args.seed + i) % (2 ** 64),
            fill_percentage=args.fill,
            roi_region_count_range=(lo, hi),
        )
        scenario = sample_scenario(bundles, config, workspace.catalog)
        doc = scenario_to_document(scenario, workspace.entry(scenario.map_id).digest)
        path = out_dir / f"{scenario.scenario_id}.json"
        path.write_text(doc)
        print(path)
    return 0


def cmd_realize(args: argparse.Namespace) -> int:
    workspace = _workspace(args)
    scenario = workspace.load_scenario_file(args.scenario)
    timeline = realize_scenario(scenario, dt=args.dt)
    document = timeline_to_document(timeline)
    if args.out:
        Path(args.out).write_text(document)
        print(args.out)
    else:
        sys.stdout.write(document)
    return 0


def cmd_export_empty(args: argparse.Namespace) -> int:
    workspace = _workspace(args)
    scenario = workspace.load_scenario_file(args.scenario)
    document = export_empty_subgraph(scenario)
    if args.out:
        Path(args.out).write_text(document)
        print(args.out)
    else:
        sys.stdout.write(document)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(_workspace(args), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scengen", description="graph-based traffic scenario workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse maps and build the offline cache")
    p.add_argument("sources", nargs="+", help="OpenDRIVE .xodr files")
    p.add_argument("--spacing", type=float, default=4.0, help="node sampling interval [m]")
    p.add_argument("--target-length", type=float, default=75.0, help="region slice target [m]")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("catalog", help="list ingested maps with their metadata")
    _add_common(p)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("generate", help="sample random scenarios from the cache")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fill", type=float, default=0.3, help="actor fill percentage [0..1]")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", default="scenarios", help="output directory")
    p.add_argument("--regions", default="1:3", help="roi region count range, lo:hi")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("realize", help="turn a scenario document into a timeline")
    p.add_argument("scenario", help="scenario document (.json)")
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--out", default=None, help="timeline output file (default: stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("export-empty", help="strip actors from a scenario subgraph")
    p.add_argument("scenario", help="scenario document (.json)")
    p.add_argument("--out", default=None, help="GraphML output file (default: stdout)")
    _add_common(p)
    p.set_defaults(func=cmd_export_empty)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui", default=None, help="serve a built frontend directory at /ui")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        for failure in exc.failures:
            print(f"  - {failure}", file=sys.stderr)
        return 2
    except ScengenError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
