"""Command line client for the experiment handlers.

Runs everything in-process by default; with ``--server URL`` the request
is POSTed to a running service instead and the response is written to
the same output files, so local and remote runs are interchangeable.

Exit codes: 0 success, 2 validation mismatch, 3 resource limit,
4 bad arguments.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx
from pydantic import ValidationError

from . import __version__
from .errors import (
    EXIT_BAD_ARGS,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_RESOURCE_LIMIT,
    ResourceLimitError,
    ThlabError,
)
from .experiments import (
    run_cardinality,
    run_convergence,
    run_moments,
    run_simulate,
    run_validate,
)
from .output import (
    write_cardinality_outputs,
    write_convergence_outputs,
    write_moments_outputs,
    write_simulate_outputs,
    write_validate_outputs,
)
from .schemas import (
    CardinalityRequest,
    CardinalityResponse,
    ConvergenceRequest,
    ConvergenceResponse,
    MomentsRequest,
    MomentsResponse,
    SimulateRequest,
    SimulateResponse,
    ValidateRequest,
    ValidateResponse,
)

_COMMANDS = {
    "simulate": (SimulateRequest, SimulateResponse, run_simulate, write_simulate_outputs),
    "moments": (MomentsRequest, MomentsResponse, run_moments, write_moments_outputs),
    "cardinality": (
        CardinalityRequest,
        CardinalityResponse,
        run_cardinality,
        write_cardinality_outputs,
    ),
    "validate": (ValidateRequest, ValidateResponse, run_validate, write_validate_outputs),
    "convergence": (
        ConvergenceRequest,
        ConvergenceResponse,
        run_convergence,
        write_convergence_outputs,
    ),
}


class _CliArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 by default, which collides with the
    # validation-mismatch exit code; route errors through EXIT_BAD_ARGS.
    def error(self, message):
        raise _CliArgumentError(message)


def _csv_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _csv_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"thlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file with request fields")
    common.add_argument("--server", help="base URL of a running service")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int)

    bool_action = argparse.BooleanOptionalAction

    sim = sub.add_parser("simulate", parents=[common], help="sample matrices and spectra")
    sim.add_argument("--kind", choices=["toeplitz", "hankel"])
    sim.add_argument("--n", type=int)
    sim.add_argument("--m", type=int)
    sim.add_argument("--trials", type=int)
    sim.add_argument("--hmax", dest="h_max", type=int)
    sim.add_argument("--dist", choices=["standard_normal", "rademacher", "uniform_sym"])
    sim.add_argument("--weights", type=_csv_floats)
    sim.add_argument("--method", choices=["dense", "fast"])
    sim.add_argument("--bins", type=int)
    sim.add_argument("--gamma-budget", dest="gamma_budget", type=int)
    sim.add_argument("--compare-theory", dest="compare_theory", action=bool_action)
    sim.add_argument("--include-eigenvalues", dest="include_eigenvalues", action=bool_action)

    mom = sub.add_parser("moments", parents=[common], help="limiting moment sequence")
    mom.add_argument("--kind", choices=["toeplitz", "hankel"])
    mom.add_argument("--m", type=int)
    mom.add_argument("--hmax", dest="h_max", type=int)
    mom.add_argument("--method", choices=["monte_carlo", "riemann_grid"])
    mom.add_argument("--budget", type=int)
    mom.add_argument("--weights", type=_csv_floats)
    mom.add_argument("--max-p", dest="max_p", type=int)

    card = sub.add_parser("cardinality", parents=[common], help="offset-vector counts")
    card.add_argument("--pmax", dest="p_max", type=int)
    card.add_argument("--mmax", dest="m_max", type=int)
    card.add_argument("--bruteforce", dest="with_bruteforce", action=bool_action)
    card.add_argument("--budget", type=int)

    val = sub.add_parser("validate", parents=[common], help="exact trace cross-check")
    val.add_argument("--seeds", type=_csv_ints)
    val.add_argument("--budget", type=int)
    val.add_argument("--inputs-per-case", dest="inputs_per_case", type=int)
    val.add_argument("--mutate", action=bool_action)

    conv = sub.add_parser("convergence", parents=[common], help="moment convergence sweep")
    conv.add_argument("--kind", choices=["toeplitz", "hankel"])
    conv.add_argument("--m", type=int)
    conv.add_argument("--dist", choices=["standard_normal", "rademacher", "uniform_sym"])
    conv.add_argument("--nlist", dest="n_list", type=_csv_ints)
    conv.add_argument("--trials", type=int)
    conv.add_argument("--h", type=int)
    conv.add_argument("--gamma-budget", dest="gamma_budget", type=int)

    return parser


def _build_request(args, model):
    cfg: dict = {}
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    skip = {"command", "config", "server"}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if key in model.model_fields:
            cfg[key] = value
    return model.model_validate(cfg)


def _make_client(server: str) -> httpx.Client:
    return httpx.Client(base_url=server, timeout=None)


def _dispatch(command: str, req, server: str | None):
    _, resp_model, handler, _ = _COMMANDS[command]
    if not server:
        return handler(req)
    with _make_client(server) as client:
        r = client.post(f"/{command}", json=req.model_dump(mode="json"))
        if r.status_code >= 400:
            detail = r.json().get("detail", r.text) if r.content else r.text
            if r.status_code == 429:
                raise ResourceLimitError(str(detail))
            raise _CliArgumentError(f"server rejected request ({r.status_code}): {detail}")
        return resp_model.model_validate(r.json())


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        req_model, _, _, writer = _COMMANDS[args.command]
        req = _build_request(args, req_model)
        resp = _dispatch(args.command, req, args.server)
        outdir = Path(req.out) if req.out else Path(".")
        for path in writer(resp, outdir):
            print(f"wrote {path}")
        if isinstance(resp, ValidateResponse):
            bad = [c for c in resp.cases if not c.ok]
            if bad:
                print(f"validation FAILED in {len(bad)} of {len(resp.cases)} cases")
                return EXIT_MISMATCH
            print(f"validation passed ({len(resp.cases)} cases)")
        return EXIT_OK
    except _CliArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except ValidationError as exc:
        print(f"error: invalid request: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except ResourceLimitError as exc:
        print(f"error: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_LIMIT
    except ThlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
