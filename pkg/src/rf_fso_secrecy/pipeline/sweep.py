"""Sweep orchestration: evaluate metrics over a dB sweep and collect ResultRows."""

from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from itertools import combinations
from pathlib import Path
from typing import Any, Optional, Sequence

from ..data import FIGURES, figure_curves
from ..data.constants import SWEEP_RANGE_DB
from ..logging import LogContext, get_logger
from ..models import (
    McConfig,
    Method,
    Metric,
    MetricResult,
    Precision,
    ResultRow,
    Scenario,
    ScenarioFile,
)
from ..paths import path_builder
from ..safety import ValidationError
from ..secrecy import evaluate
from ..settings import settings
from ..storage import build_scenario_file, format_scenario, parse_scenario_text
from ..utils import db_to_linear, get_run_id, linear_to_db
from .export import ResultExporter

logger = get_logger(__name__)

DEFAULT_METHODS = (Method.QUADRATURE, Method.MONTE_CARLO)

def with_sweep_value(s: Scenario, key: str, value_db: float) -> Scenario:
    """Scenario with one sweepable dB parameter replaced."""
    value = db_to_linear(value_db)
    if key == "rf_main.omega_db":
        return s.model_copy(update={"main_rf": s.main_rf.model_copy(update={"omega": value})})
    if key == "rf_eve.omega_db":
        return s.model_copy(update={"eve_rf": s.eve_rf.model_copy(update={"omega": value})})
    if key == "fso.u_r_db":
        return s.model_copy(update={"fso": s.fso.model_copy(update={"u_r": value})})
    raise ValidationError(f"'{key}' is not a sweepable key")

def routes_agree(results: Sequence[MetricResult]) -> bool:
    """True when every pair of route values lies within the summed error estimates."""
    return all(
        abs(a.value - b.value) <= a.error_estimate + b.error_estimate
        for a, b in combinations(results, 2)
    )

def build_row(value_db: float, metric: Metric, results: dict[Method, MetricResult]) -> ResultRow:
    """Assemble one CSV row from the per-route results."""
    closed = results.get(Method.CLOSED_FORM)
    quad = results.get(Method.QUADRATURE)
    mc = results.get(Method.MONTE_CARLO)
    return ResultRow(
        sweep_value_db=value_db,
        metric=metric,
        value_closed=closed.value if closed else None,
        err_closed=closed.error_estimate if closed else None,
        value_quad=quad.value if quad else None,
        err_quad=quad.error_estimate if quad else None,
        value_mc=mc.value if mc else None,
        mc_ci=mc.error_estimate if mc else None,
        agreement_flag=routes_agree(list(results.values())),
    )

class SweepRunner:
    """Evaluates metrics by every requested route at each sweep point."""

    def __init__(
        self,
        metrics: Sequence[Metric] = tuple(Metric),
        methods: Sequence[Method] = DEFAULT_METHODS,
        mc: Optional[McConfig] = None,
        prec: Optional[Precision] = None,
        workers: Optional[int] = None,
        bits: bool = False,
    ):
        if not metrics or not methods:
            raise ValidationError("at least one metric and one method are required")
        self.metrics = list(metrics)
        self.methods = list(methods)
        self.mc = mc
        self.prec = prec
        self.workers = workers or settings.workers
        self.bits = bits

    def evaluate_point(self, s: Scenario, value_db: float) -> list[ResultRow]:
        """One row per metric at a single scenario."""
        rows = []
        for metric in self.metrics:
            results = {}
            for method in self.methods:
                result = evaluate(metric, s, method, self.prec, self.mc)
                results[method] = result.in_bits() if self.bits else result
            row = build_row(value_db, metric, results)
            if not row.agreement_flag:
                logger.warning(f"{metric.value} at {value_db:g} dB: routes disagree beyond error bounds")
            rows.append(row)
        return rows

    def run(self, scenario_file: ScenarioFile) -> list[ResultRow]:
        """Rows in sweep order, one per sweep point per metric."""
        s = scenario_file.scenario
        sweep = scenario_file.sweep
        if sweep is None:
            points = [(linear_to_db(s.main_rf.omega), s)]
        else:
            points = [(v, with_sweep_value(s, sweep.key, v)) for v in sweep.values_db()]

        label = f"sweep over {sweep.key}" if sweep else "single point"
        with LogContext(logger, f"{label} ({len(points)} points)"):
            if self.workers <= 1 or len(points) == 1:
                per_point = [self.evaluate_point(sc, v) for v, sc in points]
            else:
                with ThreadPoolExecutor(max_workers=self.workers) as executor:
                    # map keeps submission order, so rows come out in sweep order
                    per_point = list(executor.map(lambda p: self.evaluate_point(p[1], p[0]), points))
        return [row for rows in per_point for row in rows]

def figure_scenario_text(values: dict[str, Any], sweep_key: str, points: int, header=()) -> str:
    """Scenario file text for one figure curve or preset."""
    sweep = {
        "sweep.key": sweep_key,
        "sweep.from_db": SWEEP_RANGE_DB[0],
        "sweep.to_db": SWEEP_RANGE_DB[1],
        "sweep.points": points,
    }
    return format_scenario({**values, **sweep}, header=header)

def reproduce_figure(
    fig_id: int,
    out_dir: Optional[Path] = None,
    methods: Optional[Sequence[Method]] = None,
    points: Optional[int] = None,
    mc: Optional[McConfig] = None,
) -> dict:
    """Write one CSV per curve of a figure plus a JSON manifest."""
    if fig_id not in FIGURES:
        raise ValidationError(
            f"figure id must be in {min(FIGURES)}..{max(FIGURES)}, got {fig_id}"
        )
    figure = FIGURES[fig_id]
    cfg = settings.figures
    points = points or cfg.sweep_points
    methods = list(methods or [Method(m) for m in cfg.methods])
    metric = Metric(figure["metric"])
    if mc is None and Method.MONTE_CARLO in methods:
        mc = McConfig(n_samples=cfg.mc_samples, seed=settings.montecarlo.seed)
    runner = SweepRunner(metrics=[metric], methods=methods, mc=mc)
    figure_dir = path_builder.get_figure_dir(fig_id, out_dir)

    manifest = {
        "run_id": get_run_id(),
        "figure": fig_id,
        "title": figure["title"],
        "metric": metric.value,
        "sweep_key": figure["sweep_key"],
        "methods": [m.value for m in methods],
        "started_at": datetime.now().isoformat(),
        "curves": [],
    }
    with LogContext(logger, f"Figure {fig_id}: {figure['title']}") as ctx:
        for label, values in figure_curves(fig_id):
            text = figure_scenario_text(values, figure["sweep_key"], points)
            scenario_file = build_scenario_file(parse_scenario_text(text))
            with LogContext(logger, f"curve {label}") as curve_ctx:
                rows = runner.run(scenario_file)
            csv_path = path_builder.get_curve_path(figure_dir, label)
            ResultExporter.export_csv(rows, csv_path)
            manifest["curves"].append({
                "label": label,
                "csv": str(csv_path),
                "parameters": values,
                "agreement": all(row.agreement_flag for row in rows),
                "seconds": round(curve_ctx.elapsed, 3),
            })
    manifest["seconds"] = round(ctx.elapsed, 3)
    manifest["manifest"] = str(path_builder.get_manifest_path(figure_dir))
    ResultExporter.export_manifest(manifest, Path(manifest["manifest"]))
    return manifest
