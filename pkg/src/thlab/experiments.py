"""Experiment orchestration: the handlers behind every CLI subcommand
and HTTP endpoint.

Each function takes a validated request model and returns a response
model.  Per-trial randomness comes from substreams derived from the root
seed, so any run is reproducible from its embedded config alone.
"""
from __future__ import annotations

import datetime as _dt

import numpy as np

from .combinatorics import (
    card_offsets_bruteforce,
    card_offsets_hankel,
    card_offsets_toeplitz,
)
from .ensemble import (
    MatrixKind,
    MovingAverageProcess,
    derive_seed,
    sample_patterned_matrix,
)
from .errors import UnsupportedTheoryError
from .moments import beta_sequence, derive_gamma_seed, gamma_estimate
from .schemas import (
    CardinalityRequest,
    CardinalityResponse,
    CardinalityRow,
    ConvergenceRequest,
    ConvergenceResponse,
    ConvergenceRow,
    ConvergenceSeriesRow,
    GammaRow,
    HistogramData,
    MomentRow,
    MomentsRequest,
    MomentsResponse,
    SimulateRequest,
    SimulateResponse,
    ValidateCase,
    ValidateCaseResult,
    ValidateRequest,
    ValidateResponse,
)
from .spectra import (
    StructuredOperator,
    diagonal_w2_bound,
    eigenvalues_symmetric,
    esd,
    w2_distance,
    zero_diagonal,
)
from .traceform import dense_power_trace, trace_formula_hankel, trace_formula_toeplitz

TRIAL_STREAM = 0
W2_SLACK = 1e-10


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _moments_from_eigenvalues(ev: np.ndarray, h_max: int) -> np.ndarray:
    out = np.empty(h_max)
    cur = ev.copy()
    out[0] = float(np.mean(cur))
    for h in range(2, h_max + 1):
        cur *= ev
        out[h - 1] = float(np.mean(cur))
    return out


def _unit_weights(weights) -> bool:
    return weights is None or all(float(w) == 1.0 for w in weights)


def _theory_betas(kind, m, h_max, budget, seed):
    report = beta_sequence(kind, m, h_max, budget=budget, seed=seed)
    return {e.h: (e.beta, e.std_error) for e in report.entries}


def _zscore(mean: float, std: float, trials: int, beta: float, beta_se: float):
    denom = float(np.sqrt(std * std / trials + beta_se * beta_se))
    if denom <= 0.0:
        return None
    return (mean - beta) / denom


def run_simulate(req: SimulateRequest) -> SimulateResponse:
    """Sample matrices, collect spectra and moments, compare to theory."""
    theory = None
    if req.compare_theory:
        if not _unit_weights(req.weights):
            raise UnsupportedTheoryError(
                "theory comparison requires unit weights; pass compare_theory=false"
            )
        theory = _theory_betas(req.kind, req.m, req.h_max, req.gamma_budget, req.seed)

    trial_moments = np.empty((req.trials, req.h_max))
    all_eigenvalues: list[np.ndarray] = []
    for t in range(req.trials):
        proc = MovingAverageProcess(
            req.m, req.weights, req.dist, derive_seed(req.seed, TRIAL_STREAM, t)
        )
        mat = sample_patterned_matrix(req.kind, req.n, proc)
        if req.method == "dense":
            ev = eigenvalues_symmetric(mat)
            all_eigenvalues.append(ev)
            trial_moments[t] = _moments_from_eigenvalues(ev, req.h_max)
        else:
            op = StructuredOperator.from_matrix(mat)
            power = mat.entries
            trial_moments[t, 0] = float(np.trace(power)) / req.n
            for h in range(2, req.h_max + 1):
                power = op.apply(power)
                trial_moments[t, h - 1] = float(np.trace(power)) / req.n

    rows = []
    for h in range(1, req.h_max + 1):
        col = trial_moments[:, h - 1]
        mean = float(np.mean(col))
        std = float(np.std(col, ddof=1)) if req.trials > 1 else 0.0
        beta = beta_se = z = None
        if theory is not None:
            beta, beta_se = theory[h]
            z = _zscore(mean, std, req.trials, beta, beta_se)
        rows.append(
            ConvergenceRow(
                h=h,
                n=req.n,
                mean=mean,
                std=std,
                mean_abs=float(np.mean(np.abs(col))),
                beta=beta,
                beta_se=beta_se,
                z=z,
            )
        )

    histogram = None
    eigenvalues = None
    if all_eigenvalues:
        merged = np.concatenate(all_eigenvalues)
        summary = esd(merged, bins=req.bins, h_max=1)
        histogram = HistogramData(
            edges=[float(e) for e in summary.hist_edges],
            counts=[int(c) for c in summary.hist_counts],
            total=len(merged),
        )
        if req.include_eigenvalues:
            eigenvalues = [[float(v) for v in ev] for ev in all_eigenvalues]

    return SimulateResponse(
        config=req,
        timestamp=_now(),
        rows=rows,
        histogram=histogram,
        eigenvalues=eigenvalues,
    )


def run_moments(req: MomentsRequest) -> MomentsResponse:
    """Evaluate the limiting moment sequence beta_1..beta_{h_max}."""
    report = beta_sequence(
        req.kind,
        req.m,
        req.h_max,
        method=req.method,
        budget=req.budget,
        seed=req.seed,
        weights=req.weights,
        max_p=req.max_p,
    )
    rows = []
    gammas = []
    for e in report.entries:
        rows.append(
            MomentRow(
                h=e.h,
                beta=e.beta,
                se=e.std_error,
                cardinality=e.cardinality,
                method=e.gamma.method if e.gamma else None,
            )
        )
        if e.gamma is not None:
            gammas.append(
                GammaRow(
                    p=e.gamma.p,
                    kind=e.gamma.kind,
                    value=e.gamma.value,
                    std_error=e.gamma.std_error,
                    method=e.gamma.method,
                    samples_or_gridsize=e.gamma.samples_or_gridsize,
                )
            )
    return MomentsResponse(
        config=req, timestamp=_now(), kind=report.kind, m=report.m, rows=rows, gammas=gammas
    )


def run_cardinality(req: CardinalityRequest) -> CardinalityResponse:
    """Tabulate offset-vector counts, optionally against brute force."""
    rows = []
    for p in range(1, req.p_max + 1):
        for m in range(req.m_max + 1):
            tp = card_offsets_toeplitz(p, m)
            hk = card_offsets_hankel(p, m)
            bp = ba = match = None
            if req.with_bruteforce:
                bp = card_offsets_bruteforce(p, m, alternating=False, budget=req.budget)
                ba = card_offsets_bruteforce(p, m, alternating=True, budget=req.budget)
                match = bp == tp and ba == hk
            rows.append(
                CardinalityRow(
                    p=p, m=m, toeplitz=tp, hankel=hk,
                    brute_plain=bp, brute_alternating=ba, match=match,
                )
            )
    return CardinalityResponse(config=req, timestamp=_now(), rows=rows)


def default_validate_cases() -> list[ValidateCase]:
    """The documented cross-validation grid: n <= 6 with h <= 4, plus
    n <= 3 with h in {5, 6}, for both kinds."""
    cases = []
    for kind in (MatrixKind.TOEPLITZ, MatrixKind.HANKEL):
        for n in range(1, 7):
            for h in range(1, 5):
                cases.append(ValidateCase(kind=kind, n=n, h=h))
        for n in range(1, 4):
            for h in (5, 6):
                cases.append(ValidateCase(kind=kind, n=n, h=h))
    return cases


def run_validate(req: ValidateRequest) -> ValidateResponse:
    """Cross-check the offset-vector trace formulas against dense powers.

    Every case draws small random integer inputs and compares the two
    exact routes; ``mutate`` injects an off-by-one into the formula's
    position indicator and is expected to break agreement.
    """
    cases = req.cases if req.cases is not None else default_validate_cases()
    shift = 1 if req.mutate else 0
    results = []
    for seed in req.seeds:
        for ci, case in enumerate(cases):
            rng = np.random.default_rng(
                np.random.SeedSequence(seed, spawn_key=(3, ci))
            )
            size = case.n if case.kind == MatrixKind.TOEPLITZ else 2 * case.n - 1
            mism = 0
            for _ in range(req.inputs_per_case):
                x = [int(v) for v in rng.integers(-3, 4, size=size)]
                if case.kind == MatrixKind.TOEPLITZ:
                    got = trace_formula_toeplitz(
                        x, case.n, case.h, budget=req.budget, index_shift=shift
                    )
                else:
                    got = trace_formula_hankel(
                        x, case.n, case.h, budget=req.budget, index_shift=shift
                    )
                want = dense_power_trace(x, case.n, case.h, case.kind)
                if got != want:
                    mism += 1
            results.append(
                ValidateCaseResult(
                    kind=case.kind,
                    n=case.n,
                    h=case.h,
                    seed=seed,
                    checks=req.inputs_per_case,
                    mismatches=mism,
                    ok=mism == 0,
                )
            )
    return ValidateResponse(
        config=req, timestamp=_now(), cases=results, ok=all(r.ok for r in results)
    )


def run_convergence(req: ConvergenceRequest) -> ConvergenceResponse:
    """Sweep matrix sizes: moment convergence and diagonal-removal checks."""
    if req.h % 2 == 0:
        p = req.h // 2
        g = gamma_estimate(
            req.kind, p, budget=req.gamma_budget, seed=derive_gamma_seed(req.seed, p)
        )
        card = (
            card_offsets_toeplitz(p, req.m)
            if req.kind == MatrixKind.TOEPLITZ
            else card_offsets_hankel(p, req.m)
        )
        beta, beta_se = card * g.value, card * g.std_error
    else:
        beta, beta_se = 0.0, 0.0

    rows = []
    for n in req.n_list:
        vals = np.empty(req.trials)
        w2_sq_max = 0.0
        bound_min = np.inf
        bound_ok = True
        for t in range(req.trials):
            proc = MovingAverageProcess(
                req.m, None, req.dist, derive_seed(req.seed, TRIAL_STREAM, n, t)
            )
            mat = sample_patterned_matrix(req.kind, n, proc)
            ev = eigenvalues_symmetric(mat)
            vals[t] = float(np.mean(ev**req.h))
            ev0 = eigenvalues_symmetric(zero_diagonal(mat))
            w2 = w2_distance(esd(ev, h_max=1), esd(ev0, h_max=1))
            bound = diagonal_w2_bound(mat)
            w2_sq_max = max(w2_sq_max, w2 * w2)
            bound_min = min(bound_min, bound)
            if w2 * w2 > bound + W2_SLACK:
                bound_ok = False
        mean = float(np.mean(vals))
        std = float(np.std(vals, ddof=1))
        rows.append(
            ConvergenceSeriesRow(
                n=n,
                h=req.h,
                mean=mean,
                std=std,
                var=std * std,
                beta=beta,
                beta_se=beta_se,
                z=_zscore(mean, std, req.trials, beta, beta_se),
                w2_sq_max=w2_sq_max,
                diag_bound_min=float(bound_min),
                w2_bound_ok=bound_ok,
            )
        )
    return ConvergenceResponse(config=req, timestamp=_now(), rows=rows)
