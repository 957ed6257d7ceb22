import json
import re
from pathlib import Path
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveFloat,
    ValidationError,
    field_validator,
    model_validator,
)
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.directions import DEFAULT_FR_CAP, BetaFamily, BetaRule, GuardPolicy
from src.exceptions import ConfigError
from src.problem import DEFAULT_FD_STEP, ObjectiveProblem, builtin_problem, catalog_names
from src.solver import SolveConfig, StepsizeMode
from src.stepsize import DEFAULT_RHO1, DEFAULT_RHO2, DEFAULT_SAFETY, MetricProvider


class RuntimeSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="MOCG_")

    log_level: str = Field(default="INFO", description="Root log level for the CLI")
    parallel: bool = Field(
        default=False, description="Fan multistart solves out over dask threads"
    )
    dask_scheduler: str = Field(
        default="threads", description="dask scheduler used when parallel is set"
    )
    fd_step: float = Field(
        default=DEFAULT_FD_STEP, gt=0, description="Central difference step for gradient checks"
    )
    check_points: int = Field(
        default=100, ge=1, description="Random points per problem in the gradient check suite"
    )
    check_pairs: int = Field(
        default=1000, ge=1, description="Point pairs per problem when sampling L_i and mu_i"
    )
    check_jacobians: int = Field(
        default=500, ge=1, description="Random Jacobians in the subproblem oracle suite"
    )

    @property
    def scheduler(self) -> str:
        return self.dask_scheduler if self.parallel else "synchronous"


class BetaConfig(BaseModel):
    """
    ``xi`` caps |beta| at xi * beta^FR (defaults to 0.9 for "fr"), ``eta``
    scales DY (left unset, the solver picks half the admissible range).
    """

    model_config = ConfigDict(extra="forbid")

    family: Literal["fr", "cd", "dy", "prp", "hs"] = "fr"
    xi: Optional[float] = Field(default=None, gt=0, lt=1)
    eta: Optional[float] = Field(default=None, ge=0)
    clamp_nonneg: bool = False

    @model_validator(mode="after")
    def check_modifiers(self) -> "BetaConfig":
        if self.eta is not None and self.family != "dy":
            raise ValueError("eta only applies to the dy family")
        return self

    def to_rule(self) -> BetaRule:
        xi = self.xi
        if xi is None and self.family == BetaFamily.FR.value:
            xi = DEFAULT_FR_CAP
        return BetaRule(
            BetaFamily(self.family),
            fr_cap_xi=xi,
            dy_scale_eta=self.eta,
            clamp_nonneg=self.clamp_nonneg,
        )


class RunConfig(BaseModel):
    """Schema of the JSON run configuration consumed by every CLI command."""

    model_config = ConfigDict(extra="forbid")

    problem: str
    dimension: int = Field(default=2, ge=1)
    x0: Optional[List[float]] = Field(
        default=None, description="Starting point; sampled from the box with seed if unset"
    )
    seed: int = 0
    beta: BetaConfig = Field(default_factory=BetaConfig)
    metric: Union[Literal["identity"], List[PositiveFloat]] = "identity"
    safety: float = Field(default=DEFAULT_SAFETY, gt=0, lt=1)
    tolerance: float = Field(default=1e-6, gt=0)
    max_iters: int = Field(default=2000, ge=1)
    stepsize_mode: Literal["fixed", "wolfe", "strong-wolfe"] = "fixed"
    baseline_mode: Literal["wolfe", "strong-wolfe"] = Field(
        default="wolfe", description="Line search variant run by the compare command"
    )
    record_every: int = Field(default=1, ge=1)
    rho1: float = Field(default=DEFAULT_RHO1, gt=0, lt=1)
    rho2: float = Field(default=DEFAULT_RHO2, gt=0, lt=1)
    guard: Literal["restart", "off"] = "restart"
    lipschitz: Optional[PositiveFloat] = None
    starts: int = Field(default=100, ge=1, description="Multistart count for the pareto command")
    out_dir: str = "out"

    @field_validator("problem")
    @classmethod
    def check_problem(cls, name: str) -> str:
        if name not in catalog_names():
            raise ValueError(f"unknown problem {name!r}, valid names: {', '.join(catalog_names())}")
        return name

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if not self.rho1 < self.rho2:
            raise ValueError(f"need rho1 < rho2, got rho1={self.rho1}, rho2={self.rho2}")
        if self.x0 is not None:
            if len(self.x0) != self.dimension:
                raise ValueError(f"x0 has {len(self.x0)} entries, dimension is {self.dimension}")
            if not self.build_problem().in_domain(np.asarray(self.x0)):
                raise ValueError("x0 lies outside the problem box")
        if self.metric != "identity" and len(self.metric) != self.dimension:
            raise ValueError(
                f"metric has {len(self.metric)} diagonal entries, dimension is {self.dimension}"
            )
        return self

    def build_problem(self) -> ObjectiveProblem:
        return builtin_problem(self.problem, self.dimension)

    def initial_point(self, problem: Optional[ObjectiveProblem] = None) -> np.ndarray:
        if self.x0 is not None:
            return np.asarray(self.x0, dtype=float)
        problem = problem or self.build_problem()
        return problem.sample_points(np.random.default_rng(self.seed), 1)[0]

    def metric_provider(self) -> MetricProvider:
        if self.metric == "identity":
            return MetricProvider.identity()
        return MetricProvider.fixed_diagonal(self.metric)

    def to_solve_config(self, stepsize_mode: Optional[str] = None) -> SolveConfig:
        return SolveConfig(
            beta_rule=self.beta.to_rule(),
            metric=self.metric_provider(),
            safety=self.safety,
            tolerance=self.tolerance,
            max_iters=self.max_iters,
            stepsize_mode=StepsizeMode(stepsize_mode or self.stepsize_mode),
            record_every=self.record_every,
            rho1=self.rho1,
            rho2=self.rho2,
            guard=GuardPolicy(self.guard),
            lipschitz=self.lipschitz,
        )


def _line_of(text: str, loc) -> int:
    """Line of the innermost key in ``loc`` found in the raw JSON text."""
    position = 0
    for part in loc:
        if not isinstance(part, str):
            continue
        match = re.compile(rf'"{re.escape(part)}"\s*:').search(text, position)
        if match is None:
            break
        position = match.start()
    return text.count("\n", 0, position) + 1


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Parse and validate a run configuration file.

    Raises
    ------
    ConfigError
        With a ``path:line: field: message`` text for unreadable files,
        malformed JSON and schema violations.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: cannot read config: {e.strerror}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}: {e.msg}", line=e.lineno) from e
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = error["loc"]
        line = _line_of(text, loc)
        field = ".".join(str(part) for part in loc) or "<root>"
        raise ConfigError(f"{path}:{line}: {field}: {error['msg']}", line=line) from e
