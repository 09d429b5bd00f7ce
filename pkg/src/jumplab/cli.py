"""Command-line client for the verification service.

Thin by design: each subcommand only marshals files and flags into the same
request documents the HTTP endpoints accept, runs them through the shared
handler layer (in process by default, or against a remote server via
--server), and emits the response document as JSON.

Exit codes: 0 success, 1 residual failure, 2 hypothesis violated,
3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .service import handlers
from .service.handlers import EXIT_USAGE, InputError
from .service.schemas import (
    BregmanConstantsRequest,
    BregmanConstantsResponse,
    FunctionSpec,
    ModelSpec,
    PFormRequest,
    PFormResponse,
    QuadratureSettings,
    SimulateRequest,
    SimulateResponse,
    VagueLimitRequest,
    VagueLimitResponse,
    VerifyRequest,
    VerifyResponse,
)

_LOCAL_ROUTES = {
    "/verify": (handlers.run_verify, VerifyResponse),
    "/pform": (handlers.run_pform, PFormResponse),
    "/bregman-constants": (handlers.run_bregman_constants, BregmanConstantsResponse),
    "/vague-limit": (handlers.run_vague_limit, VagueLimitResponse),
    "/simulate": (handlers.run_simulate, SimulateResponse),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2; we reserve 3
        raise UsageError(message)


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse {path}: {exc}") from exc


def _model_spec(path: str) -> ModelSpec:
    doc = _load_json(path)
    try:
        return ModelSpec.model_validate(doc)
    except ValueError as exc:
        raise UsageError(f"bad model spec {path}: {exc}") from exc


def _function_spec(source: str, seed: int) -> FunctionSpec:
    if source == "random-zero-mean":
        return FunctionSpec(generator="random-zero-mean", seed=seed)
    if source.startswith("indicator:"):
        try:
            state = int(source.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad indicator spec {source!r}") from exc
        return FunctionSpec(generator="indicator", state=state)
    doc = _load_json(source)
    if isinstance(doc, list):
        doc = {"values": doc}
    try:
        return FunctionSpec.model_validate(doc)
    except ValueError as exc:
        raise UsageError(f"bad function spec {source}: {exc}") from exc


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"{flag} expects a comma-separated list of reals") from exc


def _dispatch(args, path: str, request):
    if args.server:
        import httpx

        url = args.server.rstrip("/") + path
        try:
            reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
        except httpx.HTTPError as exc:
            raise UsageError(f"request to {url} failed: {exc}") from exc
        if reply.status_code in (400, 422):
            raise UsageError(f"server rejected request: {reply.text}")
        reply.raise_for_status()
        return _LOCAL_ROUTES[path][1].model_validate(reply.json())
    handler, _ = _LOCAL_ROUTES[path]
    return handler(request)


def _emit(response, out: str | None) -> int:
    doc = response.model_dump_json(indent=2)
    if out:
        Path(out).write_text(doc + "\n", encoding="utf-8")
        print(f"{response.command}: exit={response.exit_code} -> {out}")
    else:
        print(doc)
    return response.exit_code


def _add_common(p: argparse.ArgumentParser, with_model=True, with_f=True) -> None:
    if with_model:
        p.add_argument("--model", required=True, help="path to a model spec (JSON)")
    if with_f:
        p.add_argument(
            "--f",
            default="random-zero-mean",
            help="state function: 'random-zero-mean', 'indicator:K', or a JSON path",
        )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the report document here")
    p.add_argument("--server", default=None, help="base URL of a running service")
    p.add_argument("--verbose", action="store_true")


def build_parser() -> _Parser:
    parser = _Parser(prog="jumplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("verify", help="check the L^p energy identity")
    _add_common(p)
    p.add_argument("--p", default="2", help="comma-separated exponents, each > 1")
    p.add_argument("--tol", type=float, default=1e-7, help="pass threshold on rel_residual")
    p.add_argument("--tail-tol", type=float, default=1e-10)

    p = sub.add_parser("pform", help="compare the three p-form representations")
    _add_common(p)
    p.add_argument("--p", default="2")
    p.add_argument("--tol", type=float, default=1e-7)

    p = sub.add_parser("bregman-constants", help="scan the comparability constants")
    _add_common(p, with_model=False, with_f=False)
    p.add_argument("--p", required=True)
    p.add_argument("--x-min", type=float, default=1e-8)
    p.add_argument("--x-max", type=float, default=1e8)
    p.add_argument("--nodes", type=int, default=20_001)

    p = sub.add_parser("vague-limit", help="small-time kernel limit residual table")
    _add_common(p, with_f=False)
    p.add_argument("--t", default="0.1,0.01,0.001", help="comma-separated times")

    p = sub.add_parser("simulate", help="Monte Carlo cross-check of the semigroup")
    _add_common(p)
    p.set_defaults(f="ones")  # observable defaults to the constant function 1
    p.add_argument("--x0", type=int, default=0)
    p.add_argument("--t-max", type=float, default=0.5)
    p.add_argument("--n-paths", type=int, default=10_000)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _run(args) -> int:
    if args.command == "verify":
        req = VerifyRequest(
            model=_model_spec(args.model),
            f=_function_spec(args.f, args.seed),
            p=_floats(args.p, "--p"),
            tol=args.tol,
            quadrature=QuadratureSettings(tail_tol=args.tail_tol),
            verbose=args.verbose,
        )
        return _emit(_dispatch(args, "/verify", req), args.out)

    if args.command == "pform":
        req = PFormRequest(
            model=_model_spec(args.model),
            f=_function_spec(args.f, args.seed),
            p=_floats(args.p, "--p"),
            tol=args.tol,
        )
        return _emit(_dispatch(args, "/pform", req), args.out)

    if args.command == "bregman-constants":
        req = BregmanConstantsRequest(
            p=_floats(args.p, "--p"),
            x_min=args.x_min,
            x_max=args.x_max,
            nodes=args.nodes,
        )
        return _emit(_dispatch(args, "/bregman-constants", req), args.out)

    if args.command == "vague-limit":
        req = VagueLimitRequest(
            model=_model_spec(args.model), t=_floats(args.t, "--t")
        )
        return _emit(_dispatch(args, "/vague-limit", req), args.out)

    if args.command == "simulate":
        f = None if args.f == "ones" else _function_spec(args.f, args.seed)
        req = SimulateRequest(
            model=_model_spec(args.model),
            x0=args.x0,
            t_max=args.t_max,
            n_paths=args.n_paths,
            seed=args.seed,
            f=f,
        )
        return _emit(_dispatch(args, "/simulate", req), args.out)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("jumplab.service.app:app", host=args.host, port=args.port)
        return 0

    raise UsageError("a command is required (see --help)")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # pydantic validation failures while building requests
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
