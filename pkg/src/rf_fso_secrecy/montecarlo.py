"""Seeded Monte-Carlo estimates of the secrecy metrics.

Samples are drawn in n_batches fixed blocks. Block b always uses Philox
substream b of the master seed and draws gamma_r, gamma_d, gamma_v in that
order, so the estimates do not depend on how many workers run the blocks.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import norm
from tqdm import tqdm

from .channels import fso_sample, rf_sample, rng_stream
from .logging import LogContext, get_logger
from .models import McConfig, McEstimate, SampleSizeAdvice, Scenario
from .safety import ValidationError, validate_positive
from .settings import settings

logger = get_logger(__name__)

ESTIMATORS = ("asc", "sop_exact", "sop_lower", "pnsc")

def default_mc_config() -> McConfig:
    """McConfig built from the configured defaults."""
    cfg = settings.montecarlo
    return McConfig(
        n_samples=cfg.n_samples,
        seed=cfg.seed,
        n_streams=cfg.n_streams,
        n_batches=cfg.n_batches,
        confidence=cfg.confidence,
        fso_sampler=cfg.fso_sampler,
    )

def sample_triples(
    s: Scenario, rng: np.random.Generator, n: int, fso_sampler: str = "inverse"
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Draw (gamma_r, gamma_d, gamma_v) in the canonical order."""
    gamma_r = rf_sample(s.main_rf, rng, n)
    gamma_d = fso_sample(s.fso, rng, n, fso_sampler)
    gamma_v = rf_sample(s.eve_rf, rng, n)
    return gamma_r, gamma_d, gamma_v

def _block_means(s: Scenario, cfg: McConfig, index: int) -> np.ndarray:
    n = cfg.n_samples // cfg.n_batches
    gamma_r, gamma_d, gamma_v = sample_triples(s, rng_stream(cfg.seed, index), n, cfg.fso_sampler)
    gamma_o = np.minimum(gamma_r, gamma_d)
    theta = s.theta
    capacity = np.log1p(gamma_o) - np.log1p(gamma_v)
    lower = gamma_o < theta * gamma_v
    # exact outage event contains the lower-bound event sample by sample
    exact = lower | (1.0 + gamma_o < theta * (1.0 + gamma_v))
    return np.array([
        np.maximum(capacity, 0.0).mean(),
        exact.mean(),
        lower.mean(),
        (gamma_o > gamma_v).mean(),
    ])

def _summarize(batch_means: np.ndarray, cfg: McConfig) -> dict[str, McEstimate]:
    z = float(norm.ppf(0.5 * (1.0 + cfg.confidence)))
    n_batches = batch_means.shape[0]
    means = batch_means.mean(axis=0)
    std_errors = batch_means.std(axis=0, ddof=1) / math.sqrt(n_batches)
    out = {}
    for i, name in enumerate(ESTIMATORS):
        out[name] = McEstimate(
            mean=float(means[i]),
            std_error=float(std_errors[i]),
            ci_half_width=float(z * std_errors[i]),
            n_effective=cfg.n_samples,
        )
    return out

def estimate_metrics(
    s: Scenario, cfg: McConfig, progress: bool = False
) -> dict[str, McEstimate]:
    """Estimate asc, sop_exact, sop_lower and pnsc from common random numbers."""
    label = f"Monte-Carlo ({cfg.n_samples} samples, {cfg.n_streams} streams)"
    with LogContext(logger, label, level=logging.DEBUG):
        indices = range(cfg.n_batches)
        if cfg.n_streams == 1:
            rows = [_block_means(s, cfg, b) for b in tqdm(indices, desc="MC blocks", disable=not progress)]
        else:
            with ThreadPoolExecutor(max_workers=cfg.n_streams) as executor:
                # map yields in submission order, so the reduction is ordered by block
                rows = list(tqdm(
                    executor.map(lambda b: _block_means(s, cfg, b), indices),
                    total=cfg.n_batches,
                    desc="MC blocks",
                    disable=not progress,
                ))
        estimates = _summarize(np.vstack(rows), cfg)
        for name, est in estimates.items():
            logger.debug(f"MC {name}: {est.mean:.6g} +/- {est.ci_half_width:.2g}")
        return estimates

def variance_report(e: McEstimate, target_rel: float) -> SampleSizeAdvice:
    """Sample size needed for std_error / |mean| <= target_rel, by 1/sqrt(n) scaling."""
    validate_positive("target_rel", target_rel)
    if e.n_effective < 1:
        raise ValidationError("estimate has no samples")
    if e.mean == 0.0:
        return SampleSizeAdvice(
            current_n=e.n_effective,
            unbounded=True,
            message="mean estimate is zero; no finite sample size reaches a relative target",
        )
    ratio = e.std_error / (target_rel * abs(e.mean))
    factor = ratio ** 2
    if factor <= 1.0:
        return SampleSizeAdvice(
            current_n=e.n_effective,
            recommended_n=e.n_effective,
            factor=factor,
            sufficient=True,
            message="current sample size meets the target",
        )
    recommended = int(math.ceil(e.n_effective * factor))
    return SampleSizeAdvice(
        current_n=e.n_effective,
        recommended_n=recommended,
        factor=factor,
        message=f"increase samples by {factor:.3g}x to {recommended}",
    )
