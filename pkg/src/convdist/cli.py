"""Thin command-line client for the convdist service.

Every experiment subcommand builds a request payload, posts it to
``/experiments/run`` (against an in-process application by default, or a
remote server given ``--server``), renders the response as CSV or JSON and
exits 0 exactly when every row passed.  The CLI performs no computation of
its own.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import httpx

EXPERIMENTS = (
    "theorem1",
    "prokhorov-rate",
    "skip-two",
    "quantile-bound",
    "decomposition",
    "coupling",
    "binom-tv",
    "bernstein",
    "gaussian-bound",
)

_NEEDS_MEASURE = {
    "theorem1",
    "prokhorov-rate",
    "skip-two",
    "quantile-bound",
    "decomposition",
    "coupling",
    "gaussian-bound",
}


class CliError(Exception):
    pass


def parse_n_range(text: str) -> list[int]:
    """Parse ``a:b``, ``a:b:step`` or a single integer into an n grid."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError as exc:
        raise CliError(f"cannot parse --n value {text!r}: {exc}") from None
    if len(nums) == 1:
        grid = nums
    elif len(nums) == 2:
        grid = list(range(nums[0], nums[1] + 1))
    elif len(nums) == 3:
        grid = list(range(nums[0], nums[1] + 1, nums[2]))
    else:
        raise CliError(f"--n expects a:b[:step] or a single integer, got {text!r}")
    if not grid or any(n < 1 for n in grid):
        raise CliError(f"--n must produce positive integers, got {text!r}")
    return grid


def _measure_payload(spec: str) -> dict:
    if spec.endswith(".json") or os.path.exists(spec):
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                return {"doc": json.load(fh)}
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot load measure file {spec!r}: {exc}") from None
    return {"builtin": spec}


def _rows_to_csv(doc: dict) -> str:
    lines = ["experiment,id,n,raw,scaled,bound,pass"]
    for row in doc["rows"]:
        cells = [doc["experiment"], doc["id"], str(row["n"])]
        for key in ("raw", "scaled", "bound"):
            value = row[key]
            if value is None:
                cells.append("nan" if key != "bound" else "")
            else:
                cells.append(repr(float(value)))
        cells.append("true" if row["pass"] else "false")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


class ServiceClient:
    """HTTP client; talks to the in-process application unless --server is set."""

    def __init__(self, server: Optional[str]):
        if server:
            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise CliError(f"{path} failed ({response.status_code}): {detail}")
        return response.json()

    def close(self) -> None:
        self._client.close()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convdist",
        description="Distances between convolution powers of discrete measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--measure", help="built-in descriptor or path to a measure JSON file")
        p.add_argument("--n", dest="n_range", help="n grid as a:b[:step] or a single integer")
        p.add_argument("--p", type=float, help="binomial parameter p")
        p.add_argument("--q", type=float, help="quantile level q")
        p.add_argument("--T", dest="radius", type=float, help="truncation radius")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized searches")
        p.add_argument("--samples", type=int, default=64, help="random search budget (2D bounds)")
        p.add_argument("--budget", type=int, default=1_000_000, help="grid cell budget")
        p.add_argument("--point-budget", type=int, default=4000, help="solver support budget")
        p.add_argument("--out", help="output file path (defaults to stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--server", help="base URL of a running service (default: in-process)")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    try:
        payload: dict = {
            "experiment": args.command,
            "seed": args.seed,
            "samples": args.samples,
            "cell_budget": args.budget,
            "point_budget": args.point_budget,
        }
        if args.n_range:
            payload["n_grid"] = parse_n_range(args.n_range)
        for key in ("p", "q", "radius"):
            value = getattr(args, key)
            if value is not None:
                payload[key] = value
        if args.measure:
            payload["measure"] = _measure_payload(args.measure)
        elif args.command in _NEEDS_MEASURE:
            raise CliError(f"{args.command} requires --measure")

        client = ServiceClient(args.server)
        try:
            doc = client.post("/experiments/run", payload)
        finally:
            client.close()
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    text = _rows_to_csv(doc) if args.format == "csv" else json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if doc["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
