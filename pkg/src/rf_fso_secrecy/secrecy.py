"""Average secrecy capacity, secrecy outage lower bound and PNSC.

Each metric has three routes: closed forms in Meijer G / bivariate Fox H
functions (integer alpha/2 and integer 2*mu only), adaptive quadrature of the
defining integrals, and Monte-Carlo estimates from the channel samplers.
"""

import math
from functools import lru_cache
from typing import Optional

import numpy as np
from pydantic import BaseModel
from scipy.special import gammaln

from .channels import (
    FsoCoefficients,
    RfSeries,
    fso_cdf_with_error,
    fso_coefficients,
    rf_ccdf,
    rf_cdf,
    rf_pdf,
    rf_series,
)
from .logging import LogContext, get_logger
from .models import (
    BivariateHSpec,
    FsoChannelParams,
    GammaTriple,
    JointGammaGroup,
    McConfig,
    Method,
    Metric,
    MetricResult,
    Precision,
    Scenario,
)
from .montecarlo import default_mc_config, estimate_metrics
from .quadrature import QuadratureResult, integrate_semi_infinite
from .safety import PreconditionError, validate_integer_alpha_tilde, validate_integer_two_mu
from .settings import settings
from .specfun import ContourEstimate, bivariate_fox_h, default_precision, fox_h, meijer_g
from .utils import delta_list

logger = get_logger(__name__)

class TermEstimate(BaseModel):
    """One closed-form term next to the quadrature of its defining integral."""
    closed: float
    closed_error: float
    quadrature: float
    quadrature_error: float

    @property
    def relative_gap(self) -> float:
        scale = max(abs(self.quadrature), 1e-300)
        return abs(self.closed - self.quadrature) / scale

def s1_term(kappa: float, t_total: int, alpha_tilde: int, prec: Optional[Precision] = None) -> ContourEstimate:
    """int_0^inf exp(-kappa g^a) g^(a T) / (1 + g) dg as a Meijer G."""
    at = validate_integer_alpha_tilde(alpha_tilde)
    shifted = delta_list(at, -at * t_total)
    spec = GammaTriple.meijer(an=shifted, bm=[0.0] + shifted)
    est = meijer_g(spec, kappa, prec)
    factor = (2.0 * math.pi) ** (1 - at)
    return ContourEstimate(factor * est.value, factor * est.error, est.nodes)

def s1_term_fox(kappa: float, t_total: float, alpha_tilde: float, prec: Optional[Precision] = None) -> ContourEstimate:
    """Fox H form of s1_term; valid for any alpha_tilde > 0."""
    order = t_total + 1.0 / alpha_tilde
    spec = GammaTriple(
        upper_left=((0.0, 1.0), (1.0 - order, 1.0 / alpha_tilde)),
        lower_left=((0.0, 1.0),),
    )
    est = fox_h(spec, kappa ** (-1.0 / alpha_tilde), prec)
    factor = 1.0 / (alpha_tilde * kappa ** order)
    return ContourEstimate(factor * est.value, factor * est.error, est.nodes)

def s3_term(
    kappa: float,
    t_total: float,
    alpha_tilde: float,
    fso: FsoChannelParams,
    m_index: int,
    prec: Optional[Precision] = None,
) -> ContourEstimate:
    """int_0^inf exp(-kappa g^a) g^(a T) G_m(g) / (1 + g) dg for FSO CDF kernel m.

    G_m is the Meijer G of mixture component m+1 in the FSO CDF, without its
    sigma*c_m coefficient.
    """
    coeffs = fso_coefficients(fso)
    order = t_total + 1.0 / alpha_tilde
    scale = kappa ** (-1.0 / alpha_tilde)
    spec = BivariateHSpec(
        outer=JointGammaGroup(upper_left=((1.0 - order, 1.0 / alpha_tilde, 1.0 / alpha_tilde),)),
        inner_x=GammaTriple.meijer(an=[0.0], bm=[0.0]),
        inner_y=coeffs.cdf_specs[m_index],
        x=scale,
        y=coeffs.arg_scale * scale,
    )
    est = bivariate_fox_h(spec, prec)
    factor = 1.0 / (alpha_tilde * kappa ** order)
    return ContourEstimate(factor * est.value, factor * est.error, est.nodes)

def h1_term(kappa: float, z1: float, alpha_tilde: float) -> float:
    """int_0^inf g^(a Z1 - 1) exp(-kappa g^a) dg."""
    return math.exp(gammaln(z1) - math.log(alpha_tilde) - z1 * math.log(kappa))

def h2_term(
    kappa: float,
    z1: float,
    alpha_tilde: int,
    theta: float,
    fso: FsoChannelParams,
    m_index: int,
    prec: Optional[Precision] = None,
) -> ContourEstimate:
    """int_0^inf g^(a Z1 - 1) exp(-kappa g^a) G_m(theta g) dg as a single Meijer G."""
    at = validate_integer_alpha_tilde(alpha_tilde)
    coeffs = fso_coefficients(fso)
    r = coeffs.r
    l1, l2 = coeffs.l1, coeffs.l2[m_index]
    z2 = sum(l2) - sum(l1) - r
    y = coeffs.arg_scale * theta
    spec = GammaTriple.meijer(
        an=delta_list(at, 1.0) + [1.0 - z1],
        ap=[v for entry in l1 for v in delta_list(at, entry)],
        bm=[v for entry in l2 for v in delta_list(at, entry)],
        bq=delta_list(at, 0.0),
    )
    arg = math.exp(at * math.log(y) - math.log(kappa) - 2 * r * at * math.log(at))
    est = meijer_g(spec, arg, prec)
    log_factor = (
        (1 - at) * r * math.log(2.0 * math.pi) + z2 * math.log(at)
        - math.log(at) - z1 * math.log(kappa)
    )
    factor = math.exp(log_factor)
    return ContourEstimate(factor * est.value, factor * est.error, est.nodes)

def h2_term_fox(
    kappa: float,
    z1: float,
    alpha_tilde: float,
    theta: float,
    fso: FsoChannelParams,
    m_index: int,
    prec: Optional[Precision] = None,
) -> ContourEstimate:
    """Fox H form of h2_term; valid for any alpha_tilde > 0."""
    coeffs = fso_coefficients(fso)
    spec = GammaTriple(
        upper_left=((1.0 - z1, 1.0 / alpha_tilde), (1.0, 1.0)),
        upper_right=tuple((v, 1.0) for v in coeffs.l1),
        lower_left=tuple((v, 1.0) for v in coeffs.l2[m_index]),
        lower_right=((0.0, 1.0),),
    )
    x = coeffs.arg_scale * theta * kappa ** (-1.0 / alpha_tilde)
    est = fox_h(spec, x, prec)
    factor = math.exp(-math.log(alpha_tilde) - z1 * math.log(kappa))
    return ContourEstimate(factor * est.value, factor * est.error, est.nodes)

def _weighted(coeffs: FsoCoefficients, term) -> ContourEstimate:
    """Sum sigma*c_m * term(m) over the active mixture components."""
    value = error = 0.0
    nodes = 0
    for i in coeffs.active():
        sigma = math.exp(coeffs.log_sigma[i])
        est = term(i)
        value += sigma * est.value
        error += sigma * est.error
        nodes += est.nodes
    return ContourEstimate(value, error, nodes)

def _check_closed_form(s: Scenario, eve_cdf: bool) -> int:
    at_r, at_v = s.main_rf.alpha_tilde, s.eve_rf.alpha_tilde
    if abs(at_r - at_v) > 1e-12:
        raise PreconditionError(
            f"closed forms need alpha_r = alpha_v, got {s.main_rf.alpha} and {s.eve_rf.alpha}"
        )
    at = validate_integer_alpha_tilde(at_r)
    validate_integer_two_mu(s.main_rf.mu, "main RF")
    if eve_cdf:
        validate_integer_two_mu(s.eve_rf.mu, "eavesdropper RF")
    return at

def _series_tail(*series: RfSeries) -> float:
    return sum(item.tail_bound for item in series)

def _asc_tail_error(s: Scenario, value: float) -> float:
    """Bound on the ASC error from the truncated RF mixtures.

    A CDF deficit d shifts the integrand by at most d * ccdf_r(g) / (1 + g),
    whose integral is E[ln(1 + gamma_r)] <= ln(1 + omega_r) for alpha_tilde >= 1.
    """
    tail = _series_tail(rf_series(s.main_rf), rf_series(s.eve_rf))
    return tail * max(abs(value), math.log1p(s.main_rf.omega), 1.0)

def _asc_closed(s: Scenario, prec: Precision) -> MetricResult:
    at = _check_closed_form(s, eve_cdf=True)
    main, eve = rf_series(s.main_rf), rf_series(s.eve_rf)
    coeffs = fso_coefficients(s.fso)
    _, t1s, log_u4 = main.finite_sum_terms()
    _, t2s, log_q4 = eve.finite_sum_terms()
    cache: dict[tuple[float, int], tuple[float, float]] = {}

    def block(kappa: float, t_total: int) -> tuple[float, float]:
        key = (kappa, t_total)
        if key not in cache:
            s1 = s1_term(kappa, t_total, at, prec)
            s3 = _weighted(coeffs, lambda i: s3_term(kappa, t_total, at, s.fso, i, prec))
            cache[key] = (s1.value - s3.value, s1.error + s3.error)
        return cache[key]

    value = error = 0.0
    joint = main.u2 + eve.u2
    for lu4, t1 in zip(log_u4, t1s):
        inner, inner_err = block(main.u2, int(t1))
        for lq4, t2 in zip(log_q4, t2s):
            q4 = math.exp(lq4)
            v2, e2 = block(joint, int(t1 + t2))
            inner -= q4 * v2
            inner_err += q4 * e2
        u4 = math.exp(lu4)
        value += u4 * inner
        error += u4 * inner_err
    error += _asc_tail_error(s, value)
    return MetricResult(
        metric=Metric.ASC,
        value=max(value, 0.0),
        method=Method.CLOSED_FORM,
        error_estimate=error,
        units="nats",
        detail={
            "main_terms": float(t1s.size),
            "eve_terms": float(t2s.size),
            "special_function_blocks": float(len(cache)),
        },
    )

def _sop_closed(s: Scenario, prec: Precision) -> MetricResult:
    at = _check_closed_form(s, eve_cdf=False)
    main, eve = rf_series(s.main_rf), rf_series(s.eve_rf)
    coeffs = fso_coefficients(s.fso)
    _, t1s, log_u4 = main.finite_sum_terms()
    theta = s.theta
    kappa = main.u2 * theta ** at + eve.u2
    log_theta = math.log(theta)

    survive = error = h1_sum = h2_sum = 0.0
    for lu4, t1 in zip(log_u4, t1s):
        for k2 in range(eve.n_terms):
            z1 = (eve.u3[k2] + at * t1 + 1.0) / at
            coef = math.exp(lu4 + eve.log_u1[k2] + at * t1 * log_theta)
            h1 = h1_term(kappa, z1, at)
            h2 = _weighted(coeffs, lambda i: h2_term(kappa, z1, at, theta, s.fso, i, prec))
            survive += coef * (h1 - h2.value)
            error += coef * h2.error
            h1_sum += coef * h1
            h2_sum += coef * h2.value
    error += _series_tail(main, eve)
    return MetricResult(
        metric=Metric.SOP,
        value=float(np.clip(1.0 - survive, 0.0, 1.0)),
        method=Method.CLOSED_FORM,
        error_estimate=error,
        detail={"h1": h1_sum, "h2": h2_sum, "kappa": kappa},
    )

def _snr_scale(*scales: float) -> float:
    return float(np.median(scales))

def _integrate(func, scale: float, breakpoints: tuple[float, ...]) -> QuadratureResult:
    cfg = settings.quadrature
    return integrate_semi_infinite(
        func,
        scale,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        max_nodes=cfg.max_nodes,
        breakpoints=breakpoints,
    )

def _asc_quadrature(s: Scenario, prec: Precision) -> MetricResult:
    pr, pv, pd = s.main_rf, s.eve_rf, s.fso

    def integrand(g: np.ndarray):
        fd, fd_err = fso_cdf_with_error(pd, g, prec)
        weight = rf_cdf(pv, g) * rf_ccdf(pr, g) / (1.0 + g)
        return weight * (1.0 - fd), weight * fd_err

    result = _integrate(integrand, _snr_scale(pr.omega, pv.omega, pd.u_r), (pr.omega, pv.omega, pd.u_r))
    value = max(float(result.value), 0.0)
    error = float(result.error) + settings.quadrature.rel_tol * value + _asc_tail_error(s, value)
    return MetricResult(
        metric=Metric.ASC,
        value=value,
        method=Method.QUADRATURE,
        error_estimate=error,
        units="nats",
        detail={"nodes": float(result.n_nodes)},
    )

def _sop_quadrature(s: Scenario, prec: Precision) -> MetricResult:
    pr, pv, pd = s.main_rf, s.eve_rf, s.fso
    theta = s.theta

    def integrand(g: np.ndarray):
        shifted = theta * g
        fd, fd_err = fso_cdf_with_error(pd, shifted, prec)
        fr = rf_cdf(pr, shifted)
        density = rf_pdf(pv, g)
        return density * (fr + fd - fr * fd), density * (1.0 - fr) * fd_err

    breakpoints = (pv.omega, pr.omega / theta, pd.u_r / theta)
    result = _integrate(integrand, _snr_scale(pv.omega, pr.omega / theta, pd.u_r / theta), breakpoints)
    value = float(np.clip(result.value, 0.0, 1.0))
    # a mass deficit in either RF mixture moves the outage by at most that deficit
    error = float(result.error) + settings.quadrature.rel_tol * value
    error += _series_tail(rf_series(pr), rf_series(pv))
    return MetricResult(
        metric=Metric.SOP,
        value=value,
        method=Method.QUADRATURE,
        error_estimate=error,
        detail={"nodes": float(result.n_nodes)},
    )

@lru_cache(maxsize=32)
def _mc_estimates(s: Scenario, cfg: McConfig):
    return estimate_metrics(s, cfg)

_MC_KEYS = {Metric.ASC: "asc", Metric.SOP: "sop_lower", Metric.PNSC: "pnsc"}

def _monte_carlo(s: Scenario, metric: Metric, cfg: Optional[McConfig]) -> MetricResult:
    estimate = _mc_estimates(s, cfg or default_mc_config())[_MC_KEYS[metric]]
    return MetricResult(
        metric=metric,
        value=estimate.mean,
        method=Method.MONTE_CARLO,
        error_estimate=estimate.ci_half_width,
        units="nats" if metric is Metric.ASC else "probability",
        detail={"std_error": estimate.std_error, "n": float(estimate.n_effective)},
    )

def asc(
    s: Scenario,
    method: Method = Method.QUADRATURE,
    prec: Optional[Precision] = None,
    mc: Optional[McConfig] = None,
) -> MetricResult:
    """Average secrecy capacity in nats."""
    prec = prec or default_precision()
    with LogContext(logger, f"ASC via {method.value}"):
        if method is Method.CLOSED_FORM:
            return _asc_closed(s, prec)
        if method is Method.QUADRATURE:
            return _asc_quadrature(s, prec)
        return _monte_carlo(s, Metric.ASC, mc)

def asc_terms(
    s: Scenario, indices: tuple[int, int, int, int], prec: Optional[Precision] = None
) -> dict[str, TermEstimate]:
    """S1..S4 for series indices (N1, t1, N2, t2), closed form next to quadrature.

    S3 and S4 include the FSO CDF mixture: they are the integrals of the
    S1/S2 kernels against F_d.
    """
    at = _check_closed_form(s, eve_cdf=True)
    prec = prec or default_precision()
    n1, t1, n2, t2 = indices
    main, eve = rf_series(s.main_rf), rf_series(s.eve_rf)
    for n, t, series in ((n1, t1, main), (n2, t2, eve)):
        if not (0 <= n < series.n_terms and 0 <= t < series.w[n]):
            raise PreconditionError(f"series index (N={n}, t={t}) outside the truncated range")
    coeffs = fso_coefficients(s.fso)
    pd = s.fso

    def quadrature(kappa: float, t_total: int, with_fso: bool) -> QuadratureResult:
        def integrand(g: np.ndarray):
            kernel = np.exp(-kappa * g ** at) * g ** (at * t_total) / (1.0 + g)
            if not with_fso:
                return kernel
            fd, fd_err = fso_cdf_with_error(pd, g, prec)
            return kernel * fd, kernel * fd_err
        return _integrate(integrand, kappa ** (-1.0 / at), (pd.u_r,))

    out = {}
    for name, kappa, t_total in (("s1", main.u2, t1), ("s2", main.u2 + eve.u2, t1 + t2)):
        closed = s1_term(kappa, t_total, at, prec)
        quad = quadrature(kappa, t_total, with_fso=False)
        out[name] = TermEstimate(
            closed=closed.value, closed_error=closed.error,
            quadrature=float(quad.value), quadrature_error=float(quad.error),
        )
    for name, kappa, t_total in (("s3", main.u2, t1), ("s4", main.u2 + eve.u2, t1 + t2)):
        closed = _weighted(coeffs, lambda i: s3_term(kappa, t_total, at, pd, i, prec))
        quad = quadrature(kappa, t_total, with_fso=True)
        out[name] = TermEstimate(
            closed=closed.value, closed_error=closed.error,
            quadrature=float(quad.value), quadrature_error=float(quad.error),
        )
    return out

def sop_lower(
    s: Scenario,
    method: Method = Method.QUADRATURE,
    prec: Optional[Precision] = None,
    mc: Optional[McConfig] = None,
) -> MetricResult:
    """Lower bound Pr{gamma_o < theta * gamma_v} on the secrecy outage probability."""
    prec = prec or default_precision()
    with LogContext(logger, f"SOP lower bound via {method.value} (Rs={s.rate_rs:g})"):
        if method is Method.CLOSED_FORM:
            return _sop_closed(s, prec)
        if method is Method.QUADRATURE:
            return _sop_quadrature(s, prec)
        return _monte_carlo(s, Metric.SOP, mc)

def sop_terms(
    s: Scenario, indices: tuple[int, int, int], prec: Optional[Precision] = None
) -> dict[str, TermEstimate]:
    """H1 and H2 for series indices (N1, N2, t1), closed form next to quadrature.

    H2 includes the FSO CDF mixture evaluated at theta * gamma.
    """
    at = _check_closed_form(s, eve_cdf=False)
    prec = prec or default_precision()
    n1, n2, t1 = indices
    main, eve = rf_series(s.main_rf), rf_series(s.eve_rf)
    if not (0 <= n1 < main.n_terms and 0 <= t1 < main.w[n1] and 0 <= n2 < eve.n_terms):
        raise PreconditionError(f"series indices {indices} outside the truncated range")
    theta = s.theta
    kappa = main.u2 * theta ** at + eve.u2
    z1 = (eve.u3[n2] + at * t1 + 1.0) / at
    coeffs = fso_coefficients(s.fso)
    pd = s.fso

    def integrand(g: np.ndarray, with_fso: bool):
        kernel = g ** (at * z1 - 1.0) * np.exp(-kappa * g ** at)
        if not with_fso:
            return kernel
        fd, fd_err = fso_cdf_with_error(pd, theta * g, prec)
        return kernel * fd, kernel * fd_err

    scale = kappa ** (-1.0 / at)
    quad_h1 = _integrate(lambda g: integrand(g, False), scale, ())
    quad_h2 = _integrate(lambda g: integrand(g, True), scale, (pd.u_r / theta,))
    h2 = _weighted(coeffs, lambda i: h2_term(kappa, z1, at, theta, pd, i, prec))
    return {
        "h1": TermEstimate(
            closed=h1_term(kappa, z1, at), closed_error=0.0,
            quadrature=float(quad_h1.value), quadrature_error=float(quad_h1.error),
        ),
        "h2": TermEstimate(
            closed=h2.value, closed_error=h2.error,
            quadrature=float(quad_h2.value), quadrature_error=float(quad_h2.error),
        ),
    }

def pnsc(
    s: Scenario,
    method: Method = Method.QUADRATURE,
    prec: Optional[Precision] = None,
    mc: Optional[McConfig] = None,
) -> MetricResult:
    """Probability of non-zero secrecy capacity, 1 - sop_lower at Rs = 0."""
    outage = sop_lower(s.with_rate(0.0), method, prec, mc)
    return outage.model_copy(update={
        "metric": Metric.PNSC,
        "value": float(np.clip(1.0 - outage.value, 0.0, 1.0)),
    })

def sop_gap(
    s: Scenario, mc: Optional[McConfig] = None, prec: Optional[Precision] = None
) -> MetricResult:
    """Monte-Carlo exact SOP minus the analytic lower bound."""
    estimates = _mc_estimates(s, mc or default_mc_config())
    exact = estimates["sop_exact"]
    bound = sop_lower(s, Method.QUADRATURE, prec)
    return MetricResult(
        metric=Metric.SOP,
        value=exact.mean - bound.value,
        method=Method.MONTE_CARLO,
        error_estimate=exact.ci_half_width + bound.error_estimate,
        detail={"sop_exact": exact.mean, "sop_lower": bound.value},
    )

def evaluate(
    metric: Metric,
    s: Scenario,
    method: Method,
    prec: Optional[Precision] = None,
    mc: Optional[McConfig] = None,
) -> MetricResult:
    """Dispatch one metric by name."""
    handler = {Metric.ASC: asc, Metric.SOP: sop_lower, Metric.PNSC: pnsc}[metric]
    return handler(s, method, prec, mc)
