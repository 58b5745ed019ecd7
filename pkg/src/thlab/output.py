"""Deterministic writers for the CLI output files.

Floats are rendered with repr-faithful precision (%.17g), JSON keys keep
model order, and the only run-dependent content is the timestamp header
or field; re-running a command with the same config yields byte-identical
files apart from that line.
"""
from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel

from .schemas import (
    CardinalityResponse,
    ConvergenceResponse,
    MomentsResponse,
    SimulateResponse,
    ValidateResponse,
)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _config_comments(resp: BaseModel) -> list[str]:
    cfg = json.dumps(resp.config.model_dump(mode="json"), separators=(",", ":"))
    return [
        f"# config: {cfg}",
        f"# version: {resp.version}",
        f"# timestamp: {resp.timestamp}",
    ]


def write_csv(path: Path, comments: list[str], columns: list[str], rows: list[dict]) -> None:
    lines = list(comments)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(row.get(c)) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def write_simulate_outputs(resp: SimulateResponse, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    comments = _config_comments(resp)

    if resp.eigenvalues is not None:
        rows = [
            {"trial": t, "index": k, "eigenvalue": v}
            for t, ev in enumerate(resp.eigenvalues)
            for k, v in enumerate(ev)
        ]
        path = outdir / "eigenvalues.csv"
        write_csv(path, comments, ["trial", "index", "eigenvalue"], rows)
        written.append(path)

    if resp.histogram is not None:
        path = outdir / "histogram.json"
        write_json(
            path,
            {
                "config": resp.config.model_dump(mode="json"),
                "version": resp.version,
                "timestamp": resp.timestamp,
                "histogram": resp.histogram.model_dump(mode="json"),
            },
        )
        written.append(path)

    path = outdir / "convergence.csv"
    cols = ["h", "n", "mean", "std", "mean_abs", "beta", "beta_se", "z"]
    write_csv(path, comments, cols, [r.model_dump() for r in resp.rows])
    written.append(path)
    return written


def write_moments_outputs(resp: MomentsResponse, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "moments.json"
    write_json(path, resp.model_dump(mode="json"))
    return [path]


def write_cardinality_outputs(resp: CardinalityResponse, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "cardinality.csv"
    cols = ["p", "m", "toeplitz", "hankel", "brute_plain", "brute_alternating", "match"]
    write_csv(path, _config_comments(resp), cols, [r.model_dump() for r in resp.rows])
    return [path]


def write_validate_outputs(resp: ValidateResponse, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "validate.json"
    write_json(path, resp.model_dump(mode="json"))
    return [path]


def write_convergence_outputs(resp: ConvergenceResponse, outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "convergence.csv"
    cols = [
        "n", "h", "mean", "std", "var", "beta", "beta_se", "z",
        "w2_sq_max", "diag_bound_min", "w2_bound_ok",
    ]
    write_csv(path, _config_comments(resp), cols, [r.model_dump() for r in resp.rows])
    return [path]
