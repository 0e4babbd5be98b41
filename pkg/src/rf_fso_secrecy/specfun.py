"""Special functions evaluated by series or Mellin-Barnes contour quadrature.

Meijer G and Fox H functions are integrated along a vertical line Re(s) = c
that separates the left pole family (from Gamma(b + B s)) and the right pole
family (from Gamma(1 - a - A s)). Gamma products are summed in log space and
exponentiated only once per node, so large parameters such as eps^2 = 44.89 do
not overflow.
"""

import math
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog, minimize_scalar
from scipy.special import gammainc, iv, loggamma

from .logging import get_logger
from .models import BivariateHSpec, GammaTriple, JointGammaGroup, Precision
from .quadrature import adaptive_gauss_kronrod
from .safety import (
    BesselOverflowError,
    ContourInfeasibleError,
    GammaPoleError,
    NonConvergenceError,
    ValidationError,
    validate_nonnegative,
    validate_positive,
)
from .settings import settings

logger = get_logger(__name__)

_MAX_HEIGHT = 1e5

class ContourEstimate(NamedTuple):
    """Value of a contour integral with its error estimate."""
    value: float
    error: float
    nodes: int

def default_precision() -> Precision:
    """Precision built from the configured defaults."""
    cfg = settings.precision
    return Precision(
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        max_contour_nodes=cfg.max_contour_nodes,
        max_series_terms=cfg.max_series_terms,
    )

def complex_ln_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real):
        raise GammaPoleError(f"Gamma has a pole at z = {z.real:g}")
    return complex(loggamma(z))

def bessel_i(nu: float, x: float) -> float:
    """Modified Bessel function of the first kind I_nu(x)."""
    validate_nonnegative("x", x)
    value = float(iv(nu, x))
    if not math.isfinite(value):
        raise BesselOverflowError(
            f"I_{nu}({x}) overflows double precision; use the series form of the PDF"
        )
    return value

def lower_inc_gamma_reg(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    validate_positive("a", a)
    if not x >= 0:
        raise ValidationError(f"x must be nonnegative, got {x}")
    return float(gammainc(a, x))

def _group_arrays(group) -> tuple[np.ndarray, np.ndarray]:
    if not group:
        return np.zeros(0), np.zeros(0)
    arr = np.asarray(group, dtype=float)
    return arr[:, 0], arr[:, 1]

class _Kernel:
    """log Theta(s) of a univariate Fox H kernel."""

    def __init__(self, spec: GammaTriple):
        self.b_left, self.scale_b_left = _group_arrays(spec.lower_left)
        self.a_left, self.scale_a_left = _group_arrays(spec.upper_left)
        self.b_right, self.scale_b_right = _group_arrays(spec.lower_right)
        self.a_right, self.scale_a_right = _group_arrays(spec.upper_right)

    def log_theta(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        for b, scale in zip(self.b_left, self.scale_b_left):
            out += loggamma(b + scale * s)
        for a, scale in zip(self.a_left, self.scale_a_left):
            out += loggamma(1.0 - a - scale * s)
        for b, scale in zip(self.b_right, self.scale_b_right):
            out -= loggamma(1.0 - b - scale * s)
        for a, scale in zip(self.a_right, self.scale_a_right):
            out -= loggamma(a + scale * s)
        return out

    def left_bound(self) -> Optional[float]:
        if self.b_left.size == 0:
            return None
        return float(np.max(-self.b_left / self.scale_b_left))

    def right_bound(self) -> Optional[float]:
        if self.a_left.size == 0:
            return None
        return float(np.min((1.0 - self.a_left) / self.scale_a_left))

    def decay(self) -> float:
        return float(
            self.scale_b_left.sum() + self.scale_a_left.sum()
            - self.scale_b_right.sum() - self.scale_a_right.sum()
        )

    def stirling_exponent(self, c: float) -> float:
        return float(
            np.sum(self.b_left + self.scale_b_left * c - 0.5)
            + np.sum(0.5 - self.a_left - self.scale_a_left * c)
            - np.sum(0.5 - self.b_right - self.scale_b_right * c)
            - np.sum(self.a_right + self.scale_a_right * c - 0.5)
        )

def _choose_contour(kernel: _Kernel, log_x_ref: float) -> float:
    """Midpoint of the pole gap, or the real saddle when only one family exists."""
    left, right = kernel.left_bound(), kernel.right_bound()
    if left is not None and right is not None:
        if left >= right:
            raise ContourInfeasibleError(
                f"left poles reach {left:g} and right poles start at {right:g}; "
                "no vertical contour separates them"
            )
        return 0.5 * (left + right)
    if left is None and right is None:
        return 0.0

    def objective(c: float) -> float:
        value = kernel.log_theta(np.array([c + 0j]))[0].real - c * log_x_ref
        return float(value) if np.isfinite(value) else 1e300

    if right is None:
        bounds = (left + 1e-6, left + 40.0)
    else:
        bounds = (right - 40.0, right - 1e-6)
    found = minimize_scalar(objective, bounds=bounds, method="bounded", options={"xatol": 1e-4})
    c = float(found.x)
    # stay off the nearest pole so the integrand peak is resolvable
    if right is None:
        return max(c, left + 0.02)
    return min(c, right - 0.02)

class _Truncation(NamedTuple):
    height: float
    log_tail: np.ndarray
    log_ref: np.ndarray

def _truncation_height(
    kernel: _Kernel,
    c: float,
    log_x: np.ndarray,
    prec: Precision,
    penalty: float = 0.0,
) -> _Truncation:
    """Height T where the Stirling tail bound of the contour integrand is negligible."""
    delta = kernel.decay() - penalty
    if delta <= 0:
        raise ContourInfeasibleError(
            f"kernel has no exponential decay along Re(s) = {c:g} (delta = {delta:g})"
        )
    k = 0.5 * math.pi * delta
    rho = kernel.stirling_exponent(c)

    heights = kernel.log_theta(c + 1j * np.array([0.0, 0.25, 0.5, 1.0, 2.0])).real
    heights = heights[np.isfinite(heights)]
    log_peak = float(heights.max()) if heights.size else 0.0
    log_ref = log_peak - c * log_x - math.log(math.pi)
    log_target = np.maximum(math.log(0.1 * prec.abs_tol), math.log(1e-3 * prec.rel_tol) + log_ref)

    height = max(2.0, 2.0 * rho / k, 4.0 / k)
    while True:
        envelope = kernel.log_theta(c + 1j * np.array([height, 1.25 * height])).real
        log_env = float(np.max(envelope)) + 0.5 * math.pi * penalty * height
        log_tail = log_env - c * log_x + math.log(2.0 / k) - math.log(math.pi)
        if np.all(log_tail <= log_target):
            return _Truncation(height, log_tail, log_ref)
        height *= 1.25
        if height > _MAX_HEIGHT:
            raise NonConvergenceError(
                f"contour tail did not decay below tolerance by |Im s| = {_MAX_HEIGHT:g}"
            )

def _panel_edges(lower: float, upper: float, frequency: float, prec: Precision) -> np.ndarray:
    """Initial panels, roughly one per oscillation period."""
    periods = (upper - lower) * (frequency + 1.0) / (2.0 * math.pi)
    n_panels = int(np.clip(math.ceil(periods) + 4, 4, max(4, prec.max_contour_nodes // 30)))
    return np.linspace(lower, upper, n_panels + 1)

def _integrate_group(
    kernel: _Kernel, c: float, log_x: np.ndarray, prec: Precision
) -> tuple[np.ndarray, np.ndarray, int]:
    trunc = _truncation_height(kernel, c, log_x, prec)
    edges = _panel_edges(0.0, trunc.height, float(np.max(np.abs(log_x))), prec)
    logger.debug(f"contour Re(s)={c:.4g} height={trunc.height:.3g} panels={edges.size - 1}")

    def integrand(t: np.ndarray) -> np.ndarray:
        s = c + 1j * t
        exponent = kernel.log_theta(s)[None, :] - s[None, :] * log_x[:, None]
        return np.exp(exponent).real / math.pi

    result = adaptive_gauss_kronrod(
        integrand,
        edges,
        epsabs=prec.abs_tol,
        epsrel=prec.rel_tol,
        max_nodes=prec.max_contour_nodes,
    )
    return result.value, result.error + np.exp(trunc.log_tail), result.n_nodes

def _contour_many(
    spec: GammaTriple, xs: np.ndarray, prec: Precision
) -> tuple[np.ndarray, np.ndarray, int]:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(~(xs > 0)) or np.any(~np.isfinite(xs)):
        raise ValidationError("Mellin-Barnes arguments must be positive and finite")
    kernel = _Kernel(spec)
    log_x = np.log(xs)
    values = np.empty_like(xs)
    errors = np.empty_like(xs)
    nodes = 0

    two_sided = kernel.left_bound() is not None and kernel.right_bound() is not None
    if two_sided or xs.size == 1:
        groups = [np.arange(xs.size)]
    else:
        # one-sided kernels take a saddle contour per decade of the argument
        decade = np.floor(log_x / math.log(10.0))
        groups = [np.flatnonzero(decade == d) for d in np.unique(decade)]

    for idx in groups:
        c = _choose_contour(kernel, float(np.mean(log_x[idx])))
        v, e, n = _integrate_group(kernel, c, log_x[idx], prec)
        values[idx] = v
        errors[idx] = e
        nodes += n
    return values, errors, nodes

def fox_h_many(
    spec: GammaTriple, xs, prec: Optional[Precision] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Fox H at many arguments; returns (values, error estimates)."""
    values, errors, _ = _contour_many(spec, xs, prec or default_precision())
    return values, errors

def meijer_g_many(
    spec: GammaTriple, xs, prec: Optional[Precision] = None
) -> tuple[np.ndarray, np.ndarray]:
    """Meijer G at many arguments; returns (values, error estimates)."""
    if not spec.is_meijer:
        raise ValidationError("meijer_g requires unit scales; use fox_h")
    return fox_h_many(spec, xs, prec)

def fox_h(spec: GammaTriple, x: float, prec: Optional[Precision] = None) -> ContourEstimate:
    """Univariate Fox H function H^{m,n}_{p,q}[x]."""
    validate_positive("x", x)
    values, errors, nodes = _contour_many(spec, np.array([x]), prec or default_precision())
    return ContourEstimate(float(values[0]), float(errors[0]), nodes)

def meijer_g(spec: GammaTriple, x: float, prec: Optional[Precision] = None) -> ContourEstimate:
    """Meijer G function G^{m,n}_{p,q}[x]."""
    if not spec.is_meijer:
        raise ValidationError("meijer_g requires unit scales; use fox_h")
    return fox_h(spec, x, prec)

class _JointKernel:
    """log of the joint Gamma factors of a bivariate H kernel."""

    def __init__(self, group: JointGammaGroup):
        self.numerator = [tuple(entry) for entry in group.upper_left]
        self.upper_den = [tuple(entry) for entry in group.upper_right]
        self.lower_den = [tuple(entry) for entry in group.lower_right]

    def log_theta(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        out = np.zeros(np.broadcast(s, t).shape, dtype=complex)
        for a, scale_x, scale_y in self.numerator:
            out += loggamma(1.0 - a - scale_x * s - scale_y * t)
        for a, scale_x, scale_y in self.upper_den:
            out -= loggamma(a + scale_x * s + scale_y * t)
        for b, scale_x, scale_y in self.lower_den:
            out -= loggamma(1.0 - b - scale_x * s - scale_y * t)
        return out

    def margin(self, c1: float, c2: float) -> float:
        if not self.numerator:
            return math.inf
        return min(1.0 - a - sx * c1 - sy * c2 for a, sx, sy in self.numerator)

    def penalty(self) -> tuple[float, float]:
        dens = self.upper_den + self.lower_den
        return sum(sx for _, sx, _ in dens), sum(sy for _, _, sy in dens)

def _joint_contour(kx: _Kernel, ky: _Kernel, joint: _JointKernel) -> tuple[float, float]:
    """Max-margin contour pair satisfying every pole separation at once."""
    rows, rhs = [], []
    for bound, sign, axis in (
        (kx.left_bound(), -1.0, 0), (kx.right_bound(), 1.0, 0),
        (ky.left_bound(), -1.0, 1), (ky.right_bound(), 1.0, 1),
    ):
        if bound is None:
            continue
        row = [0.0, 0.0, 1.0]
        row[axis] = sign
        rows.append(row)
        rhs.append(sign * bound)
    for a, sx, sy in joint.numerator:
        rows.append([sx, sy, 1.0])
        rhs.append(1.0 - a)
    solved = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=np.array(rows),
        b_ub=np.array(rhs),
        bounds=[(-50.0, 50.0), (-50.0, 50.0), (None, 1.0)],
        method="highs",
    )
    if not solved.success or solved.x[2] <= 1e-9:
        raise ContourInfeasibleError("no pair of vertical contours separates the bivariate poles")
    return float(solved.x[0]), float(solved.x[1])

def bivariate_fox_h(spec: BivariateHSpec, prec: Optional[Precision] = None) -> ContourEstimate:
    """Extended generalized bivariate Fox H function by nested contour quadrature.

    The outer integral runs over Im(t) >= 0 and the inner one over the whole
    Im(s) line; conjugate symmetry supplies the other half plane. Each level
    gets rel_tol / sqrt(2) so the combined error stays within rel_tol.
    """
    prec = prec or default_precision()
    level = prec.split(2)
    kx, ky = _Kernel(spec.inner_x), _Kernel(spec.inner_y)
    joint = _JointKernel(spec.outer)
    log_x, log_y = math.log(spec.x), math.log(spec.y)

    c1 = _choose_contour(kx, log_x)
    c2 = _choose_contour(ky, log_y)
    if joint.margin(c1, c2) <= 0:
        c1, c2 = _joint_contour(kx, ky, joint)

    penalty_x, penalty_y = joint.penalty()
    trunc_x = _truncation_height(kx, c1, np.array([log_x]), level, penalty_x)
    trunc_y = _truncation_height(ky, c2, np.array([log_y]), level, penalty_y)
    inner_edges = _panel_edges(-trunc_x.height, trunc_x.height, abs(log_x), prec)
    outer_edges = _panel_edges(0.0, trunc_y.height, abs(log_y), prec)
    norm = 2.0 * math.pi ** 2

    def outer(taus: np.ndarray):
        t = c2 + 1j * taus
        log_y_part = ky.log_theta(t) - t * log_y

        def inner(sigmas: np.ndarray) -> np.ndarray:
            s = c1 + 1j * sigmas
            log_x_part = kx.log_theta(s) - s * log_x
            exponent = (
                log_y_part[:, None] + log_x_part[None, :] + joint.log_theta(s[None, :], t[:, None])
            )
            return np.exp(exponent).real / norm

        inner_result = adaptive_gauss_kronrod(
            inner,
            inner_edges,
            epsabs=level.abs_tol,
            epsrel=level.rel_tol,
            max_nodes=prec.max_contour_nodes,
        )
        return inner_result.value, inner_result.error

    result = adaptive_gauss_kronrod(
        outer,
        outer_edges,
        epsabs=level.abs_tol,
        epsrel=level.rel_tol,
        max_nodes=prec.max_contour_nodes,
    )
    value = float(result.value)
    tail_rel = float(np.exp(trunc_x.log_tail - trunc_x.log_ref)[0] + np.exp(trunc_y.log_tail - trunc_y.log_ref)[0])
    log_real = (
        kx.log_theta(np.array([c1 + 0j]))[0] + ky.log_theta(np.array([c2 + 0j]))[0]
        + joint.log_theta(np.array([c1 + 0j]), np.array([c2 + 0j]))[0]
    ).real - c1 * log_x - c2 * log_y
    scale = math.exp(log_real) / norm if np.isfinite(log_real) else abs(value)
    error = float(result.error) + tail_rel * max(abs(value), scale)
    logger.debug(
        f"bivariate H: c=({c1:.3g}, {c2:.3g}) heights=({trunc_x.height:.3g}, {trunc_y.height:.3g}) "
        f"nodes={result.n_nodes}"
    )
    return ContourEstimate(value, error, result.n_nodes)
