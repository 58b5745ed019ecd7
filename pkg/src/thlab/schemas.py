"""Pydantic request and response models for the service and the CLI.

Requests are the single source of truth for experiment configuration:
they validate ranges, serialize losslessly to JSON, and are embedded in
every response (and in every output file) so results are reproducible
from the artifact alone.  Responses carry a ``timestamp`` field; it is
the only non-deterministic part of any payload.
"""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from .ensemble import BaseDistribution, MatrixKind

DEFAULT_VALIDATE_BUDGET = 10**7
DEFAULT_ENUM_BUDGET = 10**8


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SimulateRequest(_Model):
    """Configuration of a fixed-size simulation run."""

    kind: MatrixKind
    n: int = Field(ge=1)
    m: int = Field(default=0, ge=0)
    weights: list[float] | None = None
    dist: BaseDistribution = BaseDistribution.STANDARD_NORMAL
    trials: int = Field(default=10, ge=1)
    h_max: int = Field(default=6, ge=2)
    seed: int = Field(default=0, ge=0)
    method: Literal["dense", "fast"] = "dense"
    bins: int = Field(default=101, ge=1)
    compare_theory: bool = True
    include_eigenvalues: bool = True
    gamma_budget: int | None = Field(default=None, ge=1000)
    out: str | None = None

    @model_validator(mode="after")
    def _check_weights(self) -> "SimulateRequest":
        if self.weights is not None and len(self.weights) != 2 * self.m + 1:
            raise ValueError(f"weights must have length 2m+1 = {2 * self.m + 1}")
        return self


class ConvergenceRow(_Model):
    """Per-(h, n) summary of simulated moments against the limit value."""

    h: int
    n: int
    mean: float
    std: float
    mean_abs: float
    beta: float | None = None
    beta_se: float | None = None
    z: float | None = None


class HistogramData(_Model):
    edges: list[float]
    counts: list[int]
    total: int


class SimulateResponse(_Model):
    config: SimulateRequest
    version: str = __version__
    timestamp: str
    rows: list[ConvergenceRow]
    histogram: HistogramData | None = None
    eigenvalues: list[list[float]] | None = None


class MomentsRequest(_Model):
    """Configuration for evaluating the limiting moment sequence."""

    kind: MatrixKind
    m: int = Field(default=0, ge=0)
    h_max: int = Field(default=6, ge=2)
    method: Literal["monte_carlo", "riemann_grid"] = "monte_carlo"
    budget: int | None = Field(default=None, ge=8)
    seed: int = Field(default=0, ge=0)
    weights: list[float] | None = None
    max_p: int = Field(default=6, ge=1)
    out: str | None = None


class MomentRow(_Model):
    h: int
    beta: float
    se: float
    cardinality: int | None = None
    method: str | None = None


class GammaRow(_Model):
    p: int
    kind: MatrixKind
    value: float
    std_error: float
    method: str
    samples_or_gridsize: int


class MomentsResponse(_Model):
    config: MomentsRequest
    version: str = __version__
    timestamp: str
    kind: MatrixKind
    m: int
    rows: list[MomentRow]
    gammas: list[GammaRow]


class CardinalityRequest(_Model):
    """Configuration for tabulating offset-vector counts."""

    p_max: int = Field(default=4, ge=1)
    m_max: int = Field(default=3, ge=0)
    with_bruteforce: bool = False
    budget: int = Field(default=DEFAULT_ENUM_BUDGET, ge=1)
    out: str | None = None


class CardinalityRow(_Model):
    p: int
    m: int
    toeplitz: int
    hankel: int
    brute_plain: int | None = None
    brute_alternating: int | None = None
    match: bool | None = None


class CardinalityResponse(_Model):
    config: CardinalityRequest
    version: str = __version__
    timestamp: str
    rows: list[CardinalityRow]


class ValidateCase(_Model):
    kind: MatrixKind
    n: int = Field(ge=1)
    h: int = Field(ge=1)


class ValidateRequest(_Model):
    """Configuration of the exact trace cross-validation suite."""

    seeds: list[int] = Field(default_factory=lambda: [0])
    budget: int = Field(default=DEFAULT_VALIDATE_BUDGET, ge=1)
    inputs_per_case: int = Field(default=5, ge=1)
    mutate: bool = False
    cases: list[ValidateCase] | None = None
    out: str | None = None


class ValidateCaseResult(_Model):
    kind: MatrixKind
    n: int
    h: int
    seed: int
    checks: int
    mismatches: int
    ok: bool


class ValidateResponse(_Model):
    config: ValidateRequest
    version: str = __version__
    timestamp: str
    cases: list[ValidateCaseResult]
    ok: bool


class ConvergenceRequest(_Model):
    """Configuration of a moment-convergence sweep over matrix sizes."""

    kind: MatrixKind
    m: int = Field(default=0, ge=0)
    dist: BaseDistribution = BaseDistribution.STANDARD_NORMAL
    n_list: list[int]
    trials: int = Field(default=10, ge=2)
    h: int = Field(default=4, ge=1)
    seed: int = Field(default=0, ge=0)
    gamma_budget: int | None = Field(default=None, ge=1000)
    out: str | None = None

    @model_validator(mode="after")
    def _check_n_list(self) -> "ConvergenceRequest":
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if any(n < 1 for n in self.n_list):
            raise ValueError("matrix sizes must be >= 1")
        if any(a >= b for a, b in zip(self.n_list, self.n_list[1:])):
            raise ValueError("n_list must be strictly increasing")
        return self


class ConvergenceSeriesRow(_Model):
    n: int
    h: int
    mean: float
    std: float
    var: float
    beta: float | None = None
    beta_se: float | None = None
    z: float | None = None
    w2_sq_max: float
    diag_bound_min: float
    w2_bound_ok: bool


class ConvergenceResponse(_Model):
    config: ConvergenceRequest
    version: str = __version__
    timestamp: str
    rows: list[ConvergenceSeriesRow]


class HealthResponse(_Model):
    status: str
    version: str = __version__
