"""Domain models for the RF-FSO secrecy analysis."""

import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import gammaln

from .safety import (
    ValidationError,
    validate_eta,
    validate_nonnegative,
    validate_positive,
    validate_probability,
)
from .utils import db_to_linear

class Method(str, Enum):
    """Evaluation routes for a metric."""
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"

class Metric(str, Enum):
    """Secrecy metrics."""
    ASC = "asc"
    SOP = "sop"
    PNSC = "pnsc"

class Detection(str, Enum):
    """FSO detection technique."""
    HD = "hd"
    IMDD = "imdd"

    @property
    def r(self) -> int:
        return 1 if self is Detection.HD else 2

class Precision(BaseModel):
    """Accuracy targets for special-function evaluation."""
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-8, description="Relative tolerance")
    abs_tol: float = Field(default=1e-12, description="Absolute tolerance")
    max_contour_nodes: int = Field(default=4096, description="Node budget per contour")
    max_series_terms: int = Field(default=200, description="Term budget per series")

    @model_validator(mode="after")
    def _check(self) -> "Precision":
        if self.rel_tol < 100 * 2.220446049250313e-16:
            raise ValidationError(f"rel_tol must be >= 100 * machine epsilon, got {self.rel_tol}")
        validate_positive("abs_tol", self.abs_tol)
        if self.max_contour_nodes < 15 or self.max_series_terms < 1:
            raise ValidationError("node and term budgets must be positive")
        return self

    def split(self, levels: int) -> "Precision":
        """Precision for one of `levels` nested integrals.

        Each level gets rel_tol / sqrt(levels) so the summed level errors stay
        near rel_tol.
        """
        share = 1.0 / math.sqrt(levels)
        return self.model_copy(
            update={"rel_tol": self.rel_tol * share, "abs_tol": self.abs_tol * share}
        )

Pair = tuple[float, float]

class GammaTriple(BaseModel):
    """Parameter groups of a Fox H (or Meijer G) Mellin-Barnes kernel.

    upper_left are a_1..a_n, upper_right a_{n+1}..a_p, lower_left b_1..b_m and
    lower_right b_{m+1}..b_q; every entry is (coefficient, scale).
    """
    model_config = ConfigDict(frozen=True)

    upper_left: tuple[Pair, ...] = ()
    upper_right: tuple[Pair, ...] = ()
    lower_left: tuple[Pair, ...] = ()
    lower_right: tuple[Pair, ...] = ()

    @field_validator("upper_left", "upper_right", "lower_left", "lower_right")
    @classmethod
    def _scales_positive(cls, group: tuple[Pair, ...]) -> tuple[Pair, ...]:
        for coefficient, scale in group:
            if not math.isfinite(coefficient):
                raise ValidationError(f"non-finite coefficient {coefficient}")
            if not scale > 0:
                raise ValidationError(f"scales must be strictly positive, got {scale}")
        return group

    @classmethod
    def meijer(cls, an=(), ap=(), bm=(), bq=()) -> "GammaTriple":
        """Meijer G parameters: all scales 1."""
        def ones(values):
            return tuple((float(v), 1.0) for v in values)
        return cls(upper_left=ones(an), upper_right=ones(ap), lower_left=ones(bm), lower_right=ones(bq))

    @property
    def is_meijer(self) -> bool:
        groups = self.upper_left + self.upper_right + self.lower_left + self.lower_right
        return all(scale == 1.0 for _, scale in groups)

Triple = tuple[float, float, float]

class JointGammaGroup(BaseModel):
    """Gamma factors shared by both variables of a bivariate H kernel.

    upper_left entries (a, A, A') contribute Gamma(1 - a - A s - A' t) to the
    numerator, upper_right contribute Gamma(a + A s + A' t) and lower_right
    Gamma(1 - b - B s - B' t) to the denominator.
    """
    model_config = ConfigDict(frozen=True)

    upper_left: tuple[Triple, ...] = ()
    upper_right: tuple[Triple, ...] = ()
    lower_right: tuple[Triple, ...] = ()

    @field_validator("upper_left", "upper_right", "lower_right")
    @classmethod
    def _scales_positive(cls, group: tuple[Triple, ...]) -> tuple[Triple, ...]:
        for _, scale_x, scale_y in group:
            if not (scale_x > 0 and scale_y > 0):
                raise ValidationError("joint scales must be strictly positive")
        return group

class BivariateHSpec(BaseModel):
    """Extended generalized bivariate Fox H function parameters."""
    model_config = ConfigDict(frozen=True)

    outer: JointGammaGroup = Field(default_factory=JointGammaGroup)
    inner_x: GammaTriple
    inner_y: GammaTriple
    x: float
    y: float

    @model_validator(mode="after")
    def _check(self) -> "BivariateHSpec":
        validate_positive("x", self.x)
        validate_positive("y", self.y)
        return self

class RfFadingParams(BaseModel):
    """One alpha-eta-mu RF link (main or eavesdropper)."""
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(description="Non-linearity parameter")
    eta: float = Field(description="In-phase/quadrature power ratio")
    mu: float = Field(description="Number of multipath clusters")
    omega: float = Field(description="Average SNR (linear)")

    @model_validator(mode="after")
    def _check(self) -> "RfFadingParams":
        validate_positive("alpha", self.alpha)
        validate_positive("omega", self.omega)
        validate_eta(self.eta)
        if not self.mu >= 0.5:
            raise ValidationError(f"mu must be >= 0.5, got {self.mu}")
        return self

    @classmethod
    def from_db(cls, alpha: float, eta: float, mu: float, omega_db: float) -> "RfFadingParams":
        return cls(alpha=alpha, eta=eta, mu=mu, omega=db_to_linear(omega_db))

    @property
    def alpha_tilde(self) -> float:
        return self.alpha / 2.0

    @property
    def folded_eta(self) -> float:
        """eta and 1/eta describe the same fading law; series use eta >= 1."""
        return self.eta if self.eta >= 1.0 else 1.0 / self.eta

    @property
    def a_coeff(self) -> float:
        eta = self.folded_eta
        return self.mu * (1.0 + eta) ** 2 / (2.0 * eta)

    @property
    def beta_coeff(self) -> float:
        return self.alpha_tilde * (self.mu + 0.5)

    @property
    def p_coeff(self) -> float:
        eta = self.folded_eta
        return self.mu * (eta ** 2 - 1.0) / (2.0 * eta)

    @property
    def log_s_coeff(self) -> float:
        eta, mu = self.folded_eta, self.mu
        return (
            0.5 * math.log(math.pi) + math.log(self.alpha_tilde) + (mu + 0.5) * math.log(mu)
            + (0.5 - mu) * math.log(eta - 1.0) + (mu + 0.5) * math.log(eta + 1.0)
            - 0.5 * math.log(eta) - float(gammaln(mu))
        )

class FsoChannelParams(BaseModel):
    """Malaga turbulence with pointing error on the FSO hop."""
    model_config = ConfigDict(frozen=True)

    alpha_d: float = Field(description="Large-scale scattering cells")
    beta_d: int = Field(description="Fading amount (natural number)")
    g_d: float = Field(description="Average power of the off-axis scatter")
    omega_cap_d: float = Field(description="Average power of the coherent components")
    epsilon: float = Field(description="Equivalent beam radius to jitter ratio")
    detection: Detection = Field(default=Detection.HD)
    u_r: float = Field(description="Electrical SNR (linear)")
    a0: float = Field(default=1.0, description="Fraction of power collected at zero jitter")

    @model_validator(mode="after")
    def _check(self) -> "FsoChannelParams":
        validate_positive("alpha_d", self.alpha_d)
        if self.beta_d < 1:
            raise ValidationError(f"beta_d must be a natural number, got {self.beta_d}")
        validate_nonnegative("g_d", self.g_d)
        validate_nonnegative("omega_cap_d", self.omega_cap_d)
        if self.g_d + self.omega_cap_d <= 0:
            raise ValidationError("g_d + omega_cap_d must be positive")
        validate_positive("epsilon", self.epsilon)
        validate_positive("u_r", self.u_r)
        validate_probability("a0", self.a0)
        validate_positive("a0", self.a0)
        return self

    @classmethod
    def from_constituents(
        cls,
        omega: float,
        b0: float,
        rho: float,
        phase_diff: float,
        **kwargs,
    ) -> "FsoChannelParams":
        """Derive (g_d, omega_cap_d) from the LOS / scatter constituents."""
        validate_nonnegative("omega", omega)
        validate_nonnegative("b0", b0)
        validate_probability("rho", rho)
        omega_cap = omega + 2 * b0 * rho + 2 * math.sqrt(2 * b0 * rho * omega) * math.cos(phase_diff)
        g_d = 2 * b0 * (1 - rho)
        return cls(g_d=g_d, omega_cap_d=max(omega_cap, 0.0), **kwargs)

    @property
    def r(self) -> int:
        return self.detection.r

class Scenario(BaseModel):
    """Complete wiretap configuration."""
    model_config = ConfigDict(frozen=True)

    main_rf: RfFadingParams
    eve_rf: RfFadingParams
    fso: FsoChannelParams
    rate_rs: float = Field(default=0.0, description="Target secrecy rate (bits/s/Hz)")

    @model_validator(mode="after")
    def _check(self) -> "Scenario":
        validate_nonnegative("rate_rs", self.rate_rs)
        return self

    @property
    def theta(self) -> float:
        return 2.0 ** self.rate_rs

    def with_rate(self, rate_rs: float) -> "Scenario":
        return self.model_copy(update={"rate_rs": rate_rs})

class MetricResult(BaseModel):
    """A metric value with its route and error estimate."""
    metric: Metric
    value: float
    method: Method
    error_estimate: float = Field(ge=0.0)
    units: str = Field(default="probability", description="nats, bits or probability")
    detail: dict[str, float] = Field(default_factory=dict, description="Term breakdown")

    @field_validator("error_estimate")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValidationError("error estimate must be finite")
        return value

    def in_bits(self) -> "MetricResult":
        """Convert a capacity from nats to bits."""
        if self.units != "nats":
            return self
        scale = 1.0 / math.log(2.0)
        return self.model_copy(update={
            "value": self.value * scale,
            "error_estimate": self.error_estimate * scale,
            "units": "bits",
        })

class McConfig(BaseModel):
    """Monte-Carlo run configuration."""
    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(default=10_000_000)
    seed: int = Field(default=20240521)
    n_streams: int = Field(default=1, description="Parallel workers")
    n_batches: int = Field(default=100, description="Fixed blocks used for batch means")
    confidence: float = Field(default=0.99)
    fso_sampler: str = Field(default="inverse")

    @model_validator(mode="after")
    def _check(self) -> "McConfig":
        if self.n_samples < 10_000:
            raise ValidationError(f"n_samples must be >= 1e4, got {self.n_samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n_streams < 1 or self.n_batches < 2:
            raise ValidationError("n_streams must be >= 1 and n_batches >= 2")
        if self.n_samples % self.n_streams:
            raise ValidationError(
                f"n_samples ({self.n_samples}) must be divisible by n_streams ({self.n_streams})"
            )
        if self.n_samples % self.n_batches:
            raise ValidationError(
                f"n_samples ({self.n_samples}) must be divisible by n_batches ({self.n_batches})"
            )
        validate_probability("confidence", self.confidence, open_interval=True)
        if self.fso_sampler not in ("inverse", "generative"):
            raise ValidationError(f"unknown fso_sampler '{self.fso_sampler}'")
        return self

class McEstimate(BaseModel):
    """Monte-Carlo estimate with batch-means uncertainty."""
    mean: float
    std_error: float = Field(ge=0.0)
    ci_half_width: float = Field(ge=0.0)
    n_effective: int

class SampleSizeAdvice(BaseModel):
    """Sample-size recommendation for a target relative CI width."""
    current_n: int
    recommended_n: Optional[int] = None
    factor: Optional[float] = None
    sufficient: bool = False
    unbounded: bool = False
    message: str = ""

class SweepSpec(BaseModel):
    """dB sweep over one scenario key."""
    key: str
    from_db: float
    to_db: float
    points: int = Field(ge=1)

    def values_db(self) -> list[float]:
        if self.points == 1:
            return [self.from_db]
        step = (self.to_db - self.from_db) / (self.points - 1)
        return [self.from_db + i * step for i in range(self.points)]

class ScenarioFile(BaseModel):
    """Parsed key=value scenario file."""
    scenario: Scenario
    sweep: Optional[SweepSpec] = None
    mc_seed: Optional[int] = None
    mc_samples: Optional[int] = None

class ResultRow(BaseModel):
    """One CSV row: a metric at one sweep point across routes."""
    sweep_value_db: float
    metric: Metric
    value_closed: Optional[float] = None
    err_closed: Optional[float] = None
    value_quad: Optional[float] = None
    err_quad: Optional[float] = None
    value_mc: Optional[float] = None
    mc_ci: Optional[float] = None
    agreement_flag: bool = True

    model_config = ConfigDict(json_schema_extra={
        "example": {
            "sweep_value_db": 10.0,
            "metric": "sop",
            "value_closed": 0.2135,
            "err_closed": 1e-7,
            "value_quad": 0.2135,
            "err_quad": 1e-9,
            "value_mc": 0.2137,
            "mc_ci": 0.0003,
            "agreement_flag": True,
        }
    })
