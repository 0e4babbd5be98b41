"""Error types and parameter validators."""

import math
from typing import Optional

class ValidationError(Exception):
    """Validation error."""
    pass

class ScenarioParseError(ValidationError):
    """A scenario file line could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")

class NumericalError(Exception):
    """Base class for numeric failures."""
    pass

class GammaPoleError(NumericalError):
    """Gamma function evaluated at a non-positive integer."""
    pass

class ContourInfeasibleError(NumericalError):
    """No vertical line separates the left and right pole families."""
    pass

class NonConvergenceError(NumericalError):
    """Quadrature budget exhausted before reaching the tolerance."""
    pass

class SeriesNonConvergenceError(NonConvergenceError):
    """Series tail still above tolerance after the term budget."""
    pass

class BesselOverflowError(NumericalError):
    """Modified Bessel function overflowed double precision."""
    pass

class PreconditionError(NumericalError):
    """A closed-form route was asked for parameters it does not cover."""
    pass

def validate_positive(name: str, value: float) -> None:
    """Require a finite, strictly positive value."""
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a positive finite number, got {value}")

def validate_nonnegative(name: str, value: float) -> None:
    """Require a finite, nonnegative value."""
    if not math.isfinite(value) or value < 0:
        raise ValidationError(f"{name} must be nonnegative, got {value}")

def validate_probability(name: str, value: float, open_interval: bool = False) -> None:
    """Require a value in [0, 1] (or (0, 1) when open_interval)."""
    if open_interval:
        if not 0.0 < value < 1.0:
            raise ValidationError(f"{name} must lie in (0, 1), got {value}")
    elif not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")

def validate_eta(eta: float) -> None:
    """Guard the eta = 1 singularity of the alpha-eta-mu constants."""
    validate_positive("eta", eta)
    if abs(eta - 1.0) < 1e-6:
        raise ValidationError(
            f"eta must satisfy |eta - 1| >= 1e-6, got {eta}; use e.g. 1.0001 for eta ~ 1"
        )

def validate_integer_alpha_tilde(alpha_tilde: float, what: str = "closed form") -> int:
    """Return alpha/2 as an int, or refuse."""
    rounded = round(alpha_tilde)
    if rounded < 1 or abs(alpha_tilde - rounded) > 1e-12:
        raise PreconditionError(
            f"{what} requires alpha/2 to be a positive integer, got alpha/2 = {alpha_tilde}"
        )
    return int(rounded)

def validate_integer_two_mu(mu: float, link: str) -> int:
    """Return 2*mu as an int, or refuse (finite-sum CDF needs it)."""
    two_mu = 2.0 * mu
    rounded = round(two_mu)
    if rounded < 1 or abs(two_mu - rounded) > 1e-12:
        raise PreconditionError(
            f"closed form needs 2*mu to be a positive integer on the {link} link, got mu = {mu}"
        )
    return int(rounded)
