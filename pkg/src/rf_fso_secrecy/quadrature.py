"""Adaptive Gauss-Kronrod quadrature for vectorised integrands.

Panels are refined in batches: every panel whose G7/K15 discrepancy exceeds its
share of the tolerance is bisected, and all new nodes are evaluated in a single
call. Integrands may be vector valued; the leading axes of the returned array
are integrated component-wise with shared panels.
"""

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .logging import get_logger
from .safety import NonConvergenceError

logger = get_logger(__name__)

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
])
_WGK_CENTER = 0.209482141084727828012999174891714
_WG = {1: 0.129484966168869693270611432679082,
       3: 0.279705391489276667901467771423780,
       5: 0.381830050505118944950369775488975}
_WG_CENTER = 0.417959183673469387755102040816327

NODES = np.concatenate([-_XGK, [0.0], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK, [_WGK_CENTER], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
for _idx, _w in _WG.items():
    GAUSS_WEIGHTS[_idx] = _w
    GAUSS_WEIGHTS[14 - _idx] = _w
GAUSS_WEIGHTS[7] = _WG_CENTER

_ROUNDOFF = 50.0 * np.finfo(float).eps

Integrand = Callable[[np.ndarray], Union[np.ndarray, tuple[np.ndarray, np.ndarray]]]

@dataclass
class QuadratureResult:
    """Integral, error estimate and bookkeeping."""
    value: Union[float, np.ndarray]
    error: Union[float, np.ndarray]
    n_nodes: int
    converged: bool

def _evaluate_panels(func: Integrand, lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    center = 0.5 * (hi + lo)
    nodes = (center[:, None] + half[:, None] * NODES[None, :]).ravel()
    out = func(nodes)
    aux = None
    if isinstance(out, tuple):
        out, aux = out
    values = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonConvergenceError("integrand produced non-finite values")
    shape = values.shape[:-1] + (lo.size, 15)
    values = values.reshape(shape)
    kron = (values * KRONROD_WEIGHTS).sum(-1) * half
    gauss = (values * GAUSS_WEIGHTS).sum(-1) * half
    absolute = (np.abs(values) * KRONROD_WEIGHTS).sum(-1) * half
    if aux is None:
        aux_k = np.zeros_like(kron)
    else:
        aux_k = (np.abs(np.asarray(aux, dtype=float)).reshape(shape) * KRONROD_WEIGHTS).sum(-1) * half
    return kron, gauss, absolute, aux_k

def adaptive_gauss_kronrod(
    func: Integrand,
    edges: Sequence[float],
    *,
    epsabs: float,
    epsrel: float,
    max_nodes: int,
    max_rounds: int = 80,
    raise_on_failure: bool = True,
) -> QuadratureResult:
    """Integrate func over [edges[0], edges[-1]] starting from the given panels.

    func receives a 1-d array of nodes and returns values with the node axis
    last, or a (values, inner_errors) pair when it is itself an integral.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1].copy(), edges[1:].copy()
    kron, gauss, absolute, aux = _evaluate_panels(func, lo, hi)
    n_nodes = 15 * lo.size
    converged = False

    for _ in range(max_rounds):
        total = kron.sum(-1)
        panel_err = np.abs(kron - gauss)
        err = panel_err.sum(-1)
        floor = np.asarray(
            np.maximum(np.maximum(epsabs, epsrel * np.abs(total)), _ROUNDOFF * absolute.sum(-1))
        )
        pending = np.asarray(err > floor)
        if not np.any(pending):
            converged = True
            break

        share = panel_err / floor[..., None]
        share = np.where(pending[..., None], share, 0.0)
        worst = share.reshape(-1, lo.size).max(axis=0)
        split = worst > 1.0 / lo.size
        split[np.argmax(worst)] = True

        n_split = int(split.sum())
        if n_nodes + 30 * n_split > max_nodes:
            break

        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        k2, g2, a2, x2 = _evaluate_panels(func, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[..., keep], k2], axis=-1)
        gauss = np.concatenate([gauss[..., keep], g2], axis=-1)
        absolute = np.concatenate([absolute[..., keep], a2], axis=-1)
        aux = np.concatenate([aux[..., keep], x2], axis=-1)
        n_nodes += 30 * n_split

    total = kron.sum(-1)
    error = np.abs(kron - gauss).sum(-1) + _ROUNDOFF * absolute.sum(-1) + aux.sum(-1)
    if not converged:
        message = (
            f"adaptive Gauss-Kronrod did not converge with {n_nodes} nodes "
            f"(max error {float(np.max(error)):.3e})"
        )
        if raise_on_failure:
            raise NonConvergenceError(message)
        logger.debug(message)

    if np.ndim(total) == 0:
        return QuadratureResult(float(total), float(error), n_nodes, converged)
    return QuadratureResult(total, error, n_nodes, converged)

def integrate_semi_infinite(
    func: Integrand,
    scale: float,
    *,
    epsabs: float,
    epsrel: float,
    max_nodes: int,
    breakpoints: Sequence[float] = (),
    panels_per_gap: int = 4,
) -> QuadratureResult:
    """Integrate func over (0, inf) through gamma = scale * t / (1 - t).

    breakpoints are points on the gamma axis where the integrand changes
    character; they become panel edges on the t axis.
    """
    knots = {0.0, 1.0}
    for point in breakpoints:
        if point > 0 and np.isfinite(point):
            knots.add(point / (point + scale))
    knots = sorted(knots)
    edges = [knots[0]]
    for left, right in zip(knots[:-1], knots[1:]):
        edges.extend(np.linspace(left, right, panels_per_gap + 1)[1:])

    def mapped(t: np.ndarray):
        gamma = scale * t / (1.0 - t)
        jacobian = scale / (1.0 - t) ** 2
        out = func(gamma)
        if isinstance(out, tuple):
            return out[0] * jacobian, out[1] * jacobian
        return out * jacobian

    return adaptive_gauss_kronrod(
        mapped, edges, epsabs=epsabs, epsrel=epsrel, max_nodes=max_nodes
    )
