"""Command-line client for the sweep service.

``hbfsim run`` builds an experiment config from a preset or a YAML file
plus flag overrides, submits it to the HTTP service (an in-process
instance by default, or a remote one via --server), and writes the
resulting CSV. Exit codes: 0 success, 2 invalid configuration, 1 runtime
failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys

import httpx
import yaml

from .exceptions import ConfigInvalidError, HbfsimError, UnknownPresetError
from .harness import (
    SweepResult,
    config_from_mapping,
    load_config,
    preset,
    to_csv,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbfsim")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte Carlo sweep and emit CSV")
    run.add_argument("--config", help="YAML experiment config file")
    run.add_argument("--preset", help="preset scenario name (fig3|fig4|fig5|fig6)")
    run.add_argument("--scale", type=float, default=0.25,
                     help="array-dimension scale for --preset (default 0.25)")
    run.add_argument("--trials", type=int, help="override trial count")
    run.add_argument("--seed", type=int, help="override master seed")
    run.add_argument("--out", help="CSV output path (default: config output_path or stdout)")
    run.add_argument("--workers", type=int,
                     help="worker threads (default: HBFSIM_WORKERS or 1)")
    run.add_argument("--verbose", action="store_true",
                     help="log resolution details and print a summary table")
    run.add_argument("--server", help="base URL of a running service "
                                      "(default: run in-process)")
    # every config field is also a flag overriding the file/preset
    run.add_argument("--n-r", dest="n_r", type=int)
    run.add_argument("--n-t", dest="n_t", type=int)
    run.add_argument("--alpha-r", dest="alpha_r", type=float)
    run.add_argument("--alpha-t", dest="alpha_t", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--snr-grid-db", dest="snr_grid_db",
                     help="comma-separated SNR grid, e.g. 0,5,10")
    run.add_argument("--k-t", dest="k_t", type=int)
    run.add_argument("--k-r", dest="k_r", type=int)
    run.add_argument("--l-t", dest="l_t", type=int)
    run.add_argument("--l-r", dest="l_r", type=int)
    run.add_argument("--schemes", help="JSON array of scheme descriptors")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    presets = sub.add_parser("presets", help="list presets or dump one as YAML")
    presets.add_argument("--name", help="preset to dump as a YAML config")
    presets.add_argument("--scale", type=float, default=0.25)
    return parser


def _build_config(args):
    if args.preset and args.config:
        raise ConfigInvalidError("give either --preset or --config, not both")
    if args.preset:
        base = preset(args.preset, args.scale)
    elif args.config:
        base = load_config(args.config)
    else:
        raise ConfigInvalidError("one of --preset or --config is required")

    data = base.model_dump()
    for field in ("n_r", "n_t", "alpha_r", "alpha_t", "epsilon",
                  "k_t", "k_r", "l_t", "l_r", "trials"):
        value = getattr(args, field, None)
        if value is not None:
            data[field] = value
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.snr_grid_db is not None:
        data["snr_grid_db"] = [float(x) for x in args.snr_grid_db.split(",") if x.strip()]
    if args.schemes is not None:
        try:
            data["schemes"] = json.loads(args.schemes)
        except json.JSONDecodeError as exc:
            raise ConfigInvalidError(f"--schemes is not valid JSON: {exc}") from exc
    if args.out is not None:
        data["output_path"] = args.out
    return config_from_mapping(data)


def _post_run(server: str | None, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post("/experiments/run", json=payload)

    from .service import create_app

    async def _go():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://hbfsim.internal", timeout=None
        ) as client:
            return await client.post("/experiments/run", json=payload)

    return asyncio.run(_go())


def _summarize(result: SweepResult) -> str:
    width = max(len(r.scheme) for r in result.rows)
    lines = [f"{'scheme':<{width}}  {'snr_db':>7}  {'mean':>10}  {'stderr':>9}  k   l"]
    for r in result.rows:
        lines.append(
            f"{r.scheme:<{width}}  {r.snr_db:>7.1f}  {r.mean_rate_bps_hz:>10.4f}  "
            f"{r.std_err:>9.4f}  {r.k:<3} {r.l}"
        )
    return "\n".join(lines)


def _cmd_run(args) -> int:
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    cfg = _build_config(args)
    payload = {
        "config": cfg.model_dump(mode="json"),
        "workers": args.workers,
        # verbose results retain per-trial rates so mean/std can be rechecked
        "include_per_trial": bool(args.verbose),
    }
    response = _post_run(args.server, payload)
    if response.status_code in (400, 404, 422):
        print(f"error: {response.text}", file=sys.stderr)
        return 2
    if response.status_code != 200:
        print(f"error: HTTP {response.status_code}: {response.text}", file=sys.stderr)
        return 1
    result = SweepResult.model_validate(response.json())
    csv_text = to_csv(result)
    out_path = args.out or cfg.output_path
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text)
        print(f"wrote {len(result.rows)} rows to {out_path}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    if args.verbose:
        print(_summarize(result), file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("hbfsim.service:app", host=args.host, port=args.port)
    return 0


def _cmd_presets(args) -> int:
    if args.name is None:
        from .harness import PRESET_NAMES

        print("\n".join(PRESET_NAMES))
        return 0
    cfg = preset(args.name, args.scale)
    sys.stdout.write(yaml.safe_dump(cfg.model_dump(exclude_none=True), sort_keys=False))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "serve":
            return _cmd_serve(args)
        return _cmd_presets(args)
    except (ConfigInvalidError, UnknownPresetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HbfsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
