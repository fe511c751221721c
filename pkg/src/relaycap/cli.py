"""Command-line front end.

The CLI is a thin client of the bundled HTTP service: by default it mounts
the app in process (no sockets, nothing to start), and --server points the
same requests at a remote instance. Reports go to stdout, diagnostics to
stderr. Exit codes: 0 success, 1 usage, 2 invalid input, 3 enumeration or
simulation budget exceeded, 4 a verified property failed to hold.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Optional

import httpx

from . import reporting
from .model import FIELD_COMPLEX, FIELD_REAL, diamond_network, network_to_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_CAPACITY = 3
EXIT_VIOLATION = 4

_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="relaycap",
                description="Cut-set upper bounds, quantize-map-forward lower "
                            "bounds, baseline schemes, and numeric verifiers "
                            "for Gaussian relay networks.")
    sub = p.add_subparsers(dest="command", metavar="<subcommand>",
                           parser_class=_Parser)
    sub.required = True

    def cmd(name: str, help_: str):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("network",
                        help="path to a network JSON file, or 'diamond' for "
                             "the built-in template")
        sp.add_argument("--a", type=float, default=2.0,
                        help="gain parameter of the diamond template")
        sp.add_argument("--field", choices=(FIELD_REAL, FIELD_COMPLEX),
                        help="override the file's field (what-if analysis)")
        sp.add_argument("--format", choices=("json", "csv", "text"),
                        default="json")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--server", default=None,
                        help="base URL of a running service; omit to run "
                             "in process")
        return sp

    cmd("bound", "per-cut upper bounds and the min-cut")
    cmd("achievable", "quantize-map-forward achievable rates")
    cmd("certificate", "constant-gap certificate: upper vs lower bound")
    sp = cmd("unfold", "time-expand a network into K stages")
    sp.add_argument("--stages", type=int, default=2)
    sp = cmd("verify-trellis", "exhaustive unfolded min-cut inequality check")
    sp.add_argument("--stages", type=int, default=4)
    sp = cmd("verify-loop", "cyclic conditional-entropy inequality check")
    sp.add_argument("--length", type=int, default=3,
                    help="number of subsets in the drawn sequence")
    sp.add_argument("--seed", type=int, default=0)
    sp = cmd("sweep", "compare schemes across diamond template gains")
    sp.add_argument("--param", default="a")
    sp.add_argument("--values", required=True,
                    help="comma-separated gain values, e.g. 2,4,8")
    sp.add_argument("--schemes", default="qmf,af,df,cf")
    for name, help_ in (("simulate", "Monte Carlo block error rate of "
                                     "quantize-map-forward"),
                        ("census", "distinct quantizer outputs per relay for "
                                   "a fixed message")):
        sp = cmd(name, help_)
        sp.add_argument("--trials", type=int, default=200)
        sp.add_argument("--block", type=int, default=8, help="symbols per block")
        sp.add_argument("--rate", type=float, default=1.0, help="bits per symbol")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--noise-scale", type=float, default=1.0)
        sp.add_argument("--levels", type=int, default=1 << 16,
                        help="quantizer range in steps")
    return p


def _post(server: Optional[str], path: str, payload: dict):
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
            return resp.status_code, resp.json()

    async def go():
        from .service.app import app
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://relaycap.local") as client:
            resp = await client.post(path, json=payload)
            return resp.status_code, resp.json()

    return asyncio.run(go())


def _load_network(args) -> tuple[dict, Optional[str]]:
    """Returns (network dict, field override to send or None)."""
    if args.network == "diamond":
        net = diamond_network(args.a, args.field or FIELD_REAL)
        return network_to_dict(net), None
    text = Path(args.network).read_text(encoding="utf-8")
    obj = json.loads(text)
    override = None
    if args.field and isinstance(obj, dict) and obj.get("field") != args.field:
        sys.stderr.write(f"warning: overriding field "
                         f"{obj.get('field')!r} -> {args.field!r}\n")
        override = args.field
    return obj, override


def _emit(kind: str, status: int, body, fmt: str) -> int:
    if status == 200:
        sys.stdout.write(reporting.render(kind, body, fmt))
        return EXIT_OK
    detail = body.get("detail", body) if isinstance(body, dict) else body
    sys.stderr.write(f"error: {detail}\n")
    return EXIT_CAPACITY if status == 413 else EXIT_INVALID


def _violation(note: str) -> int:
    sys.stderr.write(f"violation: {note}\n")
    return EXIT_VIOLATION


def _run(args) -> int:
    cmd, fmt = args.command, args.format

    if cmd == "sweep":
        if args.network != "diamond":
            sys.stderr.write("relaycap: error: sweep runs on the 'diamond' "
                             "template only\n")
            return EXIT_USAGE
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            sys.stderr.write(f"relaycap: error: bad --values {args.values!r}\n")
            return EXIT_USAGE
        if not values:
            sys.stderr.write("relaycap: error: --values is empty\n")
            return EXIT_USAGE
        payload = {"param": args.param, "values": values,
                   "schemes": [s for s in args.schemes.split(",") if s],
                   "field": args.field or FIELD_REAL}
        status, body = _post(args.server, "/v1/sweep", payload)
        return _emit("sweep", status, body, fmt)

    try:
        net_obj, override = _load_network(args)
    except OSError as exc:
        sys.stderr.write(f"error: cannot read {args.network}: {exc}\n")
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"error: {args.network} is not valid JSON: {exc}\n")
        return EXIT_INVALID

    base: dict = {"network": net_obj}
    if override:
        base["field"] = override

    if cmd in ("bound", "achievable", "certificate"):
        if args.threads is not None:
            base["threads"] = args.threads
        status, body = _post(args.server, f"/v1/{cmd}", base)
        code = _emit(cmd, status, body, fmt)
        if code == EXIT_OK and cmd == "certificate":
            ok = (body["gap_bits"] <= body["bound_bits"] + _TOL
                  and body["lower_bits"] >= -_TOL)
            if not ok:
                return _violation("gap exceeds the certified bound")
        return code

    if cmd == "unfold":
        status, body = _post(args.server, "/v1/unfold",
                             {**base, "stages": args.stages})
        return _emit("unfold", status, body, fmt)

    if cmd == "verify-trellis":
        status, body = _post(args.server, "/v1/verify/trellis",
                             {**base, "stages": args.stages})
        code = _emit("verify-trellis", status, body, fmt)
        if code == EXIT_OK and not body["holds"]:
            return _violation(f'{body["violations"]} cut sequences below '
                              f'the trellis threshold')
        return code

    if cmd == "verify-loop":
        status, body = _post(args.server, "/v1/verify/loop",
                             {**base, "length": args.length, "seed": args.seed})
        code = _emit("verify-loop", status, body, fmt)
        if code == EXIT_OK and not body["holds"]:
            return _violation("cyclic entropy inequality violated")
        return code

    if cmd in ("simulate", "census"):
        payload = {**base, "trials": args.trials, "block_len": args.block,
                   "rate_bits": args.rate, "seed": args.seed,
                   "noise_scale": args.noise_scale,
                   "quantizer_levels": args.levels}
        if cmd == "simulate" and args.threads is not None:
            payload["threads"] = args.threads
        status, body = _post(args.server, f"/v1/{cmd}", payload)
        code = _emit(cmd, status, body, fmt)
        if code == EXIT_OK and cmd == "census" and not body["ok"]:
            return _violation("census count exceeds the list-size cap")
        return code

    raise AssertionError(f"unhandled command {cmd}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except httpx.HTTPError as exc:
        sys.stderr.write(f"error: request failed: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
