"""Command-line client for the laboratory service.

The CLI is a thin client: every subcommand builds a request, posts it to
the FastAPI application in process (no socket) and renders the response
as JSON or CSV.  Exit codes form a contract scripts can branch on:

    0  success (for `negligible`: consistent with negligibility)
    1  negligibility refuted
    2  mollifier construction failure
    3  operational failure (syntax, admissibility, budget, bad config)
"""

from __future__ import annotations

import argparse
import asyncio
import io
import json
import sys
from typing import Optional

import httpx

from .service import SCHEMA, app

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_CONSTRUCTION = 2
EXIT_OPERATIONAL = 3

_ERROR_EXIT = {"construction": EXIT_CONSTRUCTION}


async def _post_async(path: str, payload: dict) -> httpx.Response:
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://colombeau-lab",
                                 timeout=600.0) as client:
        return await client.post(path, json=payload)


def _post(path: str, payload: dict) -> httpx.Response:
    return asyncio.run(_post_async(path, payload))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="colombeau-lab",
        description="Numerical laboratory for generalized-function "
                    "representatives: mollifiers, rate sweeps and "
                    "negligibility falsification.")
    parser.add_argument("--config", help="JSON file with defaults "
                        "mirroring the flags of the chosen subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mollifier", help="build a vanishing-moment mollifier")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--symmetric", action="store_true")
    _output_flags(p)

    p = sub.add_parser("rates", help="eps-sweep a representative seminorm")
    p.add_argument("--expr", required=False)
    p.add_argument("--K", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--radius", type=float, default=1.0)
    _grid_flags(p)
    _output_flags(p)

    p = sub.add_parser("negligible",
                       help="run the degree-bounded negligibility falsifier")
    p.add_argument("--expr", required=False)
    p.add_argument("--K", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--D-max", dest="D_max", type=int, default=3)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1e-3)
    p.add_argument("--B", nargs="+", default=["sin", "poly(0, 0, 0, 1)"])
    _grid_flags(p, k_min=1, k_max=10)
    _output_flags(p)

    p = sub.add_parser("special",
                       help="cutoff-kernel mapping rate experiments")
    p.add_argument("--expr", required=False)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--omega", type=float, nargs=2, default=[-4.0, 4.0])
    p.add_argument("--K", type=float, nargs=2, default=[-0.5, 0.5])
    p.add_argument("--L", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--c-max", dest="c_max", type=int, default=1)
    p.add_argument("--l-max", dest="l_max", type=int, default=1)
    _grid_flags(p, k_min=1, k_max=10)
    _output_flags(p)

    p = sub.add_parser("demo", help="run the canonical three experiments")
    p.add_argument("--K", type=float, nargs=2, default=[-1.0, 1.0])
    _output_flags(p)
    return parser, {name: sp for name, sp in sub.choices.items()}


def _grid_flags(p, k_min: int = 4, k_max: int = 14):
    p.add_argument("--eps-base", dest="eps_base", type=float, default=2.0)
    p.add_argument("--k-min", dest="k_min", type=int, default=k_min)
    p.add_argument("--k-max", dest="k_max", type=int, default=k_max)


def _output_flags(p):
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _reparse_with_config(args: argparse.Namespace, argv) -> argparse.Namespace:
    """Config supplies defaults; explicit flags still win on a re-parse."""
    try:
        with open(args.config) as fh:
            overrides = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"bad config file: {exc}\n")
        raise SystemExit(EXIT_OPERATIONAL)
    parser, subs = build_parser()
    sp = subs[args.command]
    valid = {action.dest for action in sp._actions}
    defaults = {}
    for key, value in overrides.items():
        dest = key.replace("-", "_")
        if dest not in valid:
            sys.stderr.write(f"unknown config key {key!r} for "
                             f"{args.command}\n")
            raise SystemExit(EXIT_OPERATIONAL)
        defaults[dest] = value
    sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def _payload(args: argparse.Namespace) -> dict:
    grid_keys = {"eps_base", "k_min", "k_max"}
    skip = {"command", "config", "output", "format"}
    payload = {}
    grid = {}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if key in grid_keys:
            grid[key] = value
        else:
            payload[key] = value
    if grid:
        payload["grid"] = grid
    return payload


def _csv_rows(command: str, result: dict):
    rows = []
    if command == "rates":
        for e, v in result["report"]["samples"]:
            rows.append((e, v, result["seminorm_id"]))
    elif command == "negligible":
        for i, rep in enumerate(result["evidence"], 1):
            for e, v in rep["samples"]:
                rows.append((e, v, f"degree-{i}"))
    elif command == "special":
        for entry in result["kernel_norms"]:
            tag = f"psi-c{entry['c']}-l{entry['l']}"
            for e, v in entry["report"]["samples"]:
                rows.append((e, v, tag))
        for e, v in result["expression"]["samples"]:
            rows.append((e, v, "expression"))
    else:
        raise ValueError(f"no CSV form for the {command} report")
    return rows


def _render(args: argparse.Namespace, body: dict) -> str:
    if args.format == "csv":
        rows = _csv_rows(body["command"], body["result"])
        buf = io.StringIO()
        buf.write("eps,value,seminorm_id\n")
        for e, v, tag in rows:
            buf.write(f"{e!r},{v!r},{tag}\n")
        return buf.getvalue()
    return json.dumps(body, indent=2) + "\n"


def _emit(args: argparse.Namespace, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Optional[list] = None) -> int:
    parser, _ = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        args = _reparse_with_config(args, argv)
    if args.command in ("rates", "negligible", "special") and not args.expr:
        sys.stderr.write("an expression is required (--expr or config)\n")
        return EXIT_OPERATIONAL

    response = _post(f"/{args.command}", _payload(args))
    try:
        body = response.json()
    except json.JSONDecodeError:
        sys.stderr.write(f"malformed response ({response.status_code})\n")
        return EXIT_OPERATIONAL

    if response.status_code != 200 or "error" in body:
        error = body.get("error") or {"kind": "invalid",
                                      "message": json.dumps(body.get("detail"))}
        sys.stderr.write(f"{error['kind']}: {error['message']}\n")
        if "condition" in error:
            sys.stderr.write(f"moment matrix condition: {error['condition']:.3e}\n")
        return _ERROR_EXIT.get(error["kind"], EXIT_OPERATIONAL)

    try:
        text = _render(args, body)
    except (KeyError, ValueError) as exc:
        sys.stderr.write(f"cannot render report: {exc}\n")
        return EXIT_OPERATIONAL
    _emit(args, text)

    if args.command == "negligible":
        if body["result"]["status"].startswith("refuted"):
            return EXIT_REFUTED
    if args.command == "mollifier" and not body["result"]["within_tolerance"]:
        return EXIT_CONSTRUCTION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
