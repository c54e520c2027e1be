"""Experiment orchestration: the calibration-selection pipeline, the
repeated stratified-CV benchmark, method comparison with paired statistics,
the isotonic convergence-rate study, and results persistence.

The selection pipeline partitions a dataset 60/20/20 (train/cal/test),
trains the base model on train, scores the calibration split, and picks the
calibration method by three mutually exclusive rules evaluated in order:
fewer than 500 calibration samples -> Platt; Shapiro-Wilk non-normality of
the calibration scores (p < 0.05) -> isotonic; otherwise 5-fold CV on the
calibration split choosing the lower mean ECE (ties go to Platt).  The
fired rule is recorded verbatim in the artifact's selection trace.

The benchmark protocol runs stratified k-fold CV repeated r times.  Within
each fold the training portion is split 75/25 (stratified) into a model-fit
part and a calibration part, every requested method's map is fit on the
calibration part only, and all methods are evaluated on the fold's test
portion — calibration data is disjoint from both model training and
evaluation by construction (checked at runtime in debug mode).  Each run's
seed derives from (base_seed, repeat, fold) through a splitmix64 chain, so
results are independent of execution order.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .calibrators import (
    METHODS,
    IdentityMap,
    ScoreSet,
    apply_map,
    fit_calibrated_pipeline,
    fit_platt,
)
from .datasets import (
    Dataset,
    SyntheticConfig,
    generate_synthetic,
    load_csv,
    load_score_csv,
    make_fold_plan,
    select_features,
    stratified_split,
    subset,
)
from .errors import (
    IncompleteRecordsError,
    InvalidSpecError,
    SchemaVersionMismatchError,
    TooFewSamplesError,
)
from .metrics import MetricReport, ece, metric_report
from .models import fit_forest, fit_logistic, score_dataset
from .stats import IntervalEstimate, PairedComparison, mean_ci, paired_t_test, shapiro_wilk
from ._util import mix_seed

__all__ = [
    "SCHEMA_VERSION",
    "AGGREGATE_METRICS",
    "DEFAULT_COMPARISON_METRICS",
    "CsvSource",
    "ScoreFilePair",
    "ScoreFileSource",
    "LogregSpec",
    "ForestSpec",
    "ExternalSpec",
    "ExperimentConfig",
    "RunRecord",
    "AggregateRow",
    "ComparisonRow",
    "ResultTable",
    "PipelineArtifact",
    "ConvergenceStudy",
    "run_enhanced_calibration",
    "run_repeated_cv",
    "compare_methods",
    "aggregate_records",
    "run_convergence_study",
    "bootstrap_metric_ci",
    "save_results",
    "load_results",
    "config_to_json",
    "config_from_json",
    "table_to_json",
    "table_from_json",
]

SCHEMA_VERSION = "1"

# MetricReport fields that aggregates and comparisons range over
AGGREGATE_METRICS = (
    "ece",
    "mce",
    "brier",
    "log_loss",
    "auc",
    "reliability",
    "hl_statistic",
    "hl_p_value",
)

# metrics whose pairwise comparisons a benchmark run emits by default
DEFAULT_COMPARISON_METRICS = ("ece", "brier")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CsvSource:
    """Benchmark data read from a labeled CSV file."""

    path: str
    label_column: str = "y"


@dataclass(frozen=True)
class ScoreFilePair:
    """Pre-computed score files for one (repeat, fold) cell: an optional
    calibration file and a test file, each with columns ``score,y``."""

    test: str
    cal: str | None = None


@dataclass(frozen=True)
class ScoreFileSource:
    """Externally produced scores, one :class:`ScoreFilePair` per
    (repeat, fold) cell in repeat-major order (len == folds * repeats)."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for entry in self.entries:
            if not isinstance(entry, ScoreFilePair):
                raise ValueError("entries must be ScoreFilePair instances")


@dataclass(frozen=True)
class LogregSpec:
    """Use the in-repo logistic regression as the base model."""

    C: float = 1.0

    @property
    def model_name(self) -> str:
        return "logreg"


@dataclass(frozen=True)
class ForestSpec:
    """Use the in-repo bagged tree forest as the base model."""

    trees: int = 100
    depth: int = 10

    @property
    def model_name(self) -> str:
        return "forest"


@dataclass(frozen=True)
class ExternalSpec:
    """Scores come from files; no model is trained."""

    @property
    def model_name(self) -> str:
        return "external"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a benchmark run depends on.

    ``feature_mode`` is ``"full"``, ``"informative"`` (the first two
    columns), or an explicit tuple of column indices.
    """

    source: object
    model: object
    methods: tuple = METHODS
    feature_mode: object = "full"
    folds: int = 5
    repeats: int = 10
    bins: int = 10
    base_seed: int = 0
    family_alpha: float = 0.05

    def __post_init__(self):
        if not isinstance(self.source, (SyntheticConfig, CsvSource, ScoreFileSource)):
            raise ValueError(
                "source must be a SyntheticConfig, CsvSource, or ScoreFileSource"
            )
        if not isinstance(self.model, (LogregSpec, ForestSpec, ExternalSpec)):
            raise ValueError("model must be a LogregSpec, ForestSpec, or ExternalSpec")
        methods = tuple(str(m).lower() for m in self.methods)
        if not methods:
            raise ValueError("methods must be non-empty")
        for m in methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; valid: {', '.join(METHODS)}")
        if len(set(methods)) != len(methods):
            raise ValueError("methods must be unique")
        object.__setattr__(self, "methods", methods)
        if isinstance(self.feature_mode, str):
            if self.feature_mode not in ("full", "informative"):
                raise ValueError(
                    f"feature_mode must be 'full', 'informative', or index tuple, "
                    f"got {self.feature_mode!r}"
                )
        else:
            object.__setattr__(
                self, "feature_mode", tuple(int(i) for i in self.feature_mode)
            )
        if not (isinstance(self.folds, int) and self.folds >= 2):
            raise ValueError(f"folds must be an integer >= 2, got {self.folds!r}")
        if not (isinstance(self.repeats, int) and self.repeats >= 1):
            raise ValueError(f"repeats must be an integer >= 1, got {self.repeats!r}")
        if not (isinstance(self.bins, int) and self.bins >= 1):
            raise ValueError(f"bins must be an integer >= 1, got {self.bins!r}")
        if not (isinstance(self.base_seed, int) and self.base_seed >= 0):
            raise ValueError(f"base_seed must be a non-negative integer, got {self.base_seed!r}")
        if not (0.0 < self.family_alpha < 1.0):
            raise ValueError(f"family_alpha must be in (0, 1), got {self.family_alpha!r}")
        external_model = isinstance(self.model, ExternalSpec)
        external_source = isinstance(self.source, ScoreFileSource)
        if external_model != external_source:
            raise ValueError(
                "an external model requires a score-file source and vice versa"
            )
        if external_source:
            expected = self.folds * self.repeats
            if len(self.source.entries) != expected:
                raise ValueError(
                    f"score-file source needs folds*repeats = {expected} entries, "
                    f"got {len(self.source.entries)}"
                )
            needs_cal = any(m != "uncalibrated" for m in methods)
            if needs_cal and any(e.cal is None for e in self.source.entries):
                raise ValueError(
                    "calibrated methods require a 'cal' score file in every entry"
                )


# ---------------------------------------------------------------------------
# result rows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunRecord:
    """Metrics of one (repeat, fold, model, method) evaluation."""

    repeat: int
    fold: int
    model_name: str
    method_name: str
    metrics: MetricReport


@dataclass(frozen=True)
class AggregateRow:
    """Mean / sd / 95% CI of one metric for one (model, method) cell,
    over the runs where the metric was finite."""

    model_name: str
    method_name: str
    metric: str
    mean: float
    sd: float
    ci_lower: float
    ci_upper: float
    runs: int


@dataclass(frozen=True)
class ComparisonRow:
    """One paired method comparison on one metric."""

    metric: str
    result: PairedComparison


@dataclass(frozen=True)
class ResultTable:
    """A benchmark's complete output: records, aggregates, comparisons."""

    config: ExperimentConfig
    records: tuple
    aggregates: tuple
    comparisons: tuple
    comparison_metrics: tuple
    bonferroni_threshold: float | None


@dataclass(frozen=True)
class PipelineArtifact:
    """Outcome of the end-to-end calibration-selection pipeline.

    ``holdout`` pairs the calibrated test-split probabilities with their
    labels (what ``report`` was computed from), so callers can derive
    further statistics — e.g. a bootstrap CI — without re-running.
    """

    model: object
    method_name: str
    calibration_map: object
    report: MetricReport
    selection_trace: str
    branch: str
    holdout: ScoreSet


@dataclass(frozen=True)
class ConvergenceStudy:
    """Isotonic error vs sample size and the fitted log-log slope."""

    sizes: tuple
    mean_errors: np.ndarray
    trial_errors: np.ndarray
    slope: float
    intercept: float


# ---------------------------------------------------------------------------
# the calibration-selection pipeline
# ---------------------------------------------------------------------------

_SMALL_CAL_LIMIT = 500
_NORMALITY_ALPHA = 0.05
_SELECTION_FOLDS = 5


def _fit_base_model(model_spec, data: Dataset, seed: int):
    if isinstance(model_spec, LogregSpec):
        return fit_logistic(data, C=model_spec.C)
    if isinstance(model_spec, ForestSpec):
        return fit_forest(data, model_spec.trees, model_spec.depth, seed=seed)
    raise ValueError(f"cannot train a base model from {type(model_spec).__name__}")


def _deal_folds(labels: np.ndarray, folds: int, rng) -> np.ndarray:
    """Stratified fold ids: shuffle each class, deal round-robin."""
    fold_of = np.empty(labels.size, dtype=np.intp)
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        perm = rng.permutation(idx)
        fold_of[perm] = np.arange(perm.size, dtype=np.intp) % folds
    return fold_of


def _fit_method_map(cal_scores: ScoreSet, method: str):
    """Fit one benchmark method's calibration map on a calibration split.

    The benchmark and the selection pipeline fit ``"platt"`` with the
    classical smoothed pseudo-targets ((n_pos+1)/(n_pos+2), 1/(n_neg+2))
    — the variant mainstream calibration implementations use, and the one
    that reproduces the published reference measurements this suite is
    benchmarked against.  The plain maximum-likelihood fit on raw 0/1
    labels remains the ``fit_platt`` default for direct library use.
    """
    if method == "platt":
        return fit_platt(cal_scores, smooth_targets=True)
    return fit_calibrated_pipeline(cal_scores, method)


def _cv_mean_ece(cal_scores: ScoreSet, method: str, fold_of: np.ndarray, folds: int, bins: int) -> float:
    per_fold = []
    for fold in range(folds):
        held_out = fold_of == fold
        fit_part = ScoreSet(cal_scores.scores[~held_out], cal_scores.labels[~held_out])
        cal_map = _fit_method_map(fit_part, method)
        probs = apply_map(cal_map, cal_scores.scores[held_out])
        per_fold.append(ece(probs, cal_scores.labels[held_out], bins=bins))
    return float(np.mean(per_fold))


def run_enhanced_calibration(data: Dataset, model_spec, seed: int) -> PipelineArtifact:
    """Run the selection pipeline end to end on one dataset.

    Partitions 60/20/20 (train/cal/test, stratified), trains the base
    model, picks the calibration method by the three ordered rules
    (calibration size, score normality, CV), fits the chosen map on the
    full calibration split, and reports held-out test metrics.
    """
    counts = np.bincount(data.labels, minlength=2)
    if counts.min() < 3:
        raise TooFewSamplesError(
            f"each class needs >= 3 samples, got {counts[0]} neg / {counts[1]} pos"
        )
    train, rest = stratified_split(data, 0.6, seed=mix_seed(seed, 1))
    cal, test = stratified_split(rest, 0.5, seed=mix_seed(seed, 2))
    model = _fit_base_model(model_spec, train, seed=mix_seed(seed, 3))
    cal_scores = score_dataset(model, cal)
    test_scores = score_dataset(model, test)

    if cal.n < _SMALL_CAL_LIMIT:
        chosen = "platt"
        branch = "cal_size"
        trace = f"platt: cal size {cal.n} < {_SMALL_CAL_LIMIT}"
    else:
        normality = shapiro_wilk(cal_scores.scores)
        if normality.p_value < _NORMALITY_ALPHA:
            chosen = "isotonic"
            branch = "shapiro_wilk"
            trace = (
                f"isotonic: shapiro-wilk p={normality.p_value:.4g} < {_NORMALITY_ALPHA}"
            )
        else:
            branch = "cv"
            rng = np.random.default_rng(mix_seed(seed, 4))
            fold_of = _deal_folds(cal_scores.labels, _SELECTION_FOLDS, rng)
            ece_platt = _cv_mean_ece(cal_scores, "platt", fold_of, _SELECTION_FOLDS, 10)
            ece_iso = _cv_mean_ece(cal_scores, "isotonic", fold_of, _SELECTION_FOLDS, 10)
            chosen = "platt" if ece_platt <= ece_iso else "isotonic"
            trace = (
                f"cv: mean ece platt={ece_platt:.4g} isotonic={ece_iso:.4g} -> {chosen}"
            )

    cal_map = _fit_method_map(cal_scores, chosen)
    probs = apply_map(cal_map, test_scores.scores)
    report = metric_report(probs, test_scores.labels, bins=10)
    return PipelineArtifact(
        model=model,
        method_name=chosen,
        calibration_map=cal_map,
        report=report,
        selection_trace=trace,
        branch=branch,
        holdout=ScoreSet(probs, test_scores.labels),
    )


# ---------------------------------------------------------------------------
# the repeated-CV benchmark
# ---------------------------------------------------------------------------

def _materialize_dataset(config: ExperimentConfig) -> Dataset:
    if isinstance(config.source, SyntheticConfig):
        data = generate_synthetic(config.source)
    else:
        data = load_csv(config.source.path, config.source.label_column)
    if config.feature_mode == "full":
        return data
    if config.feature_mode == "informative":
        return select_features(data, [0, 1])
    return select_features(data, list(config.feature_mode))


def _run_model_benchmark(config: ExperimentConfig) -> list:
    data = _materialize_dataset(config)
    plan = make_fold_plan(data, config.folds, config.repeats, config.base_seed)
    model_name = config.model.model_name
    records = []
    for cell in plan.assignments:
        if __debug__:
            overlap = np.intersect1d(cell.train_indices, cell.test_indices)
            assert overlap.size == 0, "train/test leakage in fold plan"
        run_seed = mix_seed(config.base_seed, cell.repeat_index, cell.fold_index)
        train_data = subset(data, cell.train_indices)
        test_data = subset(data, cell.test_indices)
        fit_part, cal_part = stratified_split(train_data, 0.75, seed=mix_seed(run_seed, 1))
        if __debug__:
            assert fit_part.n + cal_part.n == train_data.n, "fit/cal split must partition train"
        model = _fit_base_model(config.model, fit_part, seed=mix_seed(run_seed, 2))
        cal_scores = score_dataset(model, cal_part)
        test_scores = score_dataset(model, test_data)
        for method in config.methods:
            cal_map = _fit_method_map(cal_scores, method)
            probs = apply_map(cal_map, test_scores.scores)
            report = metric_report(probs, test_scores.labels, bins=config.bins)
            records.append(
                RunRecord(cell.repeat_index, cell.fold_index, model_name, method, report)
            )
    return records


def _run_external_benchmark(config: ExperimentConfig) -> list:
    records = []
    needs_cal = any(m != "uncalibrated" for m in config.methods)
    for repeat in range(config.repeats):
        for fold in range(config.folds):
            entry = config.source.entries[repeat * config.folds + fold]
            test_scores = load_score_csv(entry.test)
            cal_scores = load_score_csv(entry.cal) if needs_cal else None
            for method in config.methods:
                if method == "uncalibrated":
                    cal_map = IdentityMap()
                else:
                    cal_map = _fit_method_map(cal_scores, method)
                probs = apply_map(cal_map, test_scores.scores)
                report = metric_report(probs, test_scores.labels, bins=config.bins)
                records.append(RunRecord(repeat, fold, "external", method, report))
    return records


def aggregate_records(records) -> tuple:
    """Per (model, method, metric) mean / sd / 95% CI over finite values.

    A metric that is NaN for a run (the goodness-of-fit test can be
    undefined under degenerate grouping) is excluded from that metric's
    aggregation; ``runs`` records how many values remained.
    """
    groups: dict = {}
    order: list = []
    for record in records:
        key = (record.model_name, record.method_name)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(record.metrics)
    rows = []
    for key in sorted(order):
        model_name, method_name = key
        reports = groups[key]
        for metric in AGGREGATE_METRICS:
            values = np.array([getattr(r, metric) for r in reports], dtype=np.float64)
            values = values[np.isfinite(values)]
            runs = int(values.size)
            if runs == 0:
                mean = sd = lo = hi = float("nan")
            elif runs == 1:
                mean = float(values[0])
                sd = lo = hi = float("nan")
            else:
                mean = float(values.mean())
                sd = float(values.std(ddof=1))
                interval = mean_ci(values, level=0.95)
                lo, hi = interval.lower, interval.upper
            rows.append(
                AggregateRow(model_name, method_name, metric, mean, sd, lo, hi, runs)
            )
    return tuple(rows)


def _paired_values(records, method: str, metric: str) -> dict:
    values = {}
    for record in records:
        if record.method_name == method:
            values[(record.repeat, record.fold)] = getattr(record.metrics, metric)
    return values


def _comparisons_for(records, methods, metrics, family_alpha: float):
    """All unordered method pairs on each metric, Bonferroni-corrected
    across every emitted pair."""
    pairs = [
        (methods[i], methods[j])
        for i in range(len(methods))
        for j in range(i + 1, len(methods))
    ]
    total = len(pairs) * len(metrics)
    if total == 0:
        return None, ()
    threshold = family_alpha / total
    rows = []
    for metric in metrics:
        per_method = {m: _paired_values(records, m, metric) for m in methods}
        keys = sorted(per_method[methods[0]])
        for m in methods:
            if sorted(per_method[m]) != keys or not keys:
                raise IncompleteRecordsError(
                    f"method {m!r} lacks complete (repeat, fold) records for {metric!r}"
                )
        for name_a, name_b in pairs:
            a = np.array([per_method[name_a][k] for k in keys])
            b = np.array([per_method[name_b][k] for k in keys])
            result = paired_t_test(a, b, name_a=name_a, name_b=name_b)
            result = dataclasses.replace(
                result, significant_at_corrected_alpha=bool(result.p_value < threshold)
            )
            rows.append(ComparisonRow(metric=metric, result=result))
    return threshold, tuple(rows)


def run_repeated_cv(config: ExperimentConfig) -> ResultTable:
    """Run the full benchmark protocol and assemble the result table.

    Emits one record per (repeat, fold, method); aggregates every metric
    and compares all method pairs on the default comparison metrics with a
    Bonferroni threshold spanning every emitted pair.  Deterministic for a
    fixed config.
    """
    if isinstance(config.model, ExternalSpec):
        records = _run_external_benchmark(config)
    else:
        records = _run_model_benchmark(config)
    records.sort(key=lambda r: (r.model_name, r.method_name, r.repeat, r.fold))
    records = tuple(records)
    aggregates = aggregate_records(records)
    if len(config.methods) >= 2:
        metrics = DEFAULT_COMPARISON_METRICS
        threshold, comparisons = _comparisons_for(
            records, config.methods, metrics, config.family_alpha
        )
    else:
        metrics, threshold, comparisons = (), None, ()
    return ResultTable(
        config=config,
        records=records,
        aggregates=aggregates,
        comparisons=comparisons,
        comparison_metrics=tuple(metrics),
        bonferroni_threshold=threshold,
    )


def compare_methods(table: ResultTable, metric: str, family_alpha: float | None = None) -> list:
    """Pairwise paired t-tests between all methods on one metric.

    The Bonferroni family is the emitted pairs for this metric; each
    comparison's ``significant_at_corrected_alpha`` reflects the corrected
    threshold ``family_alpha / len(pairs)``.  ``family_alpha`` defaults to
    the table's configured value.
    """
    if metric not in AGGREGATE_METRICS:
        raise ValueError(
            f"unknown metric {metric!r}; valid: {', '.join(AGGREGATE_METRICS)}"
        )
    if family_alpha is None:
        family_alpha = table.config.family_alpha
    if not (0.0 < family_alpha < 1.0):
        raise ValueError(f"family_alpha must be in (0, 1), got {family_alpha!r}")
    methods = table.config.methods
    if len(methods) < 2:
        raise IncompleteRecordsError("comparisons need at least two methods")
    _, rows = _comparisons_for(table.records, methods, (metric,), family_alpha)
    return [row.result for row in rows]


# ---------------------------------------------------------------------------
# convergence-rate study
# ---------------------------------------------------------------------------

_EVAL_SAMPLE = 10_000


def _validate_g_star(g_star) -> None:
    grid = np.linspace(0.0, 1.0, 1001)
    vals = np.asarray(g_star(grid), dtype=np.float64)
    if vals.shape != grid.shape or not np.isfinite(vals).all():
        raise InvalidSpecError("g_star must map [0,1] vectors to finite values")
    if (vals < 0.0).any() or (vals > 1.0).any():
        raise InvalidSpecError("g_star values must lie in [0, 1]")
    if (np.diff(vals) < -1e-12).any():
        raise InvalidSpecError("g_star must be non-decreasing on [0, 1]")


def run_convergence_study(g_star, sizes, trials: int, seed: int) -> ConvergenceStudy:
    """Measure isotonic-fit error against a known monotone truth.

    For each size n and trial: draw s ~ U[0,1] and y ~ Bernoulli(g_star(s)),
    fit the isotonic map, and average |fit(s') - g_star(s')| over a fresh
    10,000-point evaluation sample.  Returns per-size mean errors and the
    least-squares slope of log(mean error) against log(n).
    """
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 4:
        raise InvalidSpecError(f"need >= 4 sample sizes, got {len(sizes)}")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidSpecError("sizes must be strictly increasing")
    if sizes[0] < 1:
        raise InvalidSpecError("sizes must be positive")
    if sizes[-1] < 100 * sizes[0]:
        raise InvalidSpecError(
            f"sizes must span >= 2 decades, got {sizes[0]}..{sizes[-1]}"
        )
    if trials < 10:
        raise InvalidSpecError(f"need >= 10 trials, got {trials}")
    _validate_g_star(g_star)

    trial_errors = np.empty((len(sizes), trials))
    for i, n in enumerate(sizes):
        for j in range(trials):
            rng = np.random.default_rng(mix_seed(seed, i, j))
            s = rng.random(n)
            y = (rng.random(n) < g_star(s)).astype(np.int64)
            iso = fit_calibrated_pipeline(ScoreSet(s, y), "isotonic")
            s_eval = rng.random(_EVAL_SAMPLE)
            fitted = apply_map(iso, s_eval)
            trial_errors[i, j] = float(np.mean(np.abs(fitted - g_star(s_eval))))
    mean_errors = trial_errors.mean(axis=1)
    slope, intercept = np.polyfit(np.log(sizes), np.log(mean_errors), 1)
    return ConvergenceStudy(
        sizes=sizes,
        mean_errors=mean_errors,
        trial_errors=trial_errors,
        slope=float(slope),
        intercept=float(intercept),
    )


# ---------------------------------------------------------------------------
# single-split bootstrap CI
# ---------------------------------------------------------------------------

def bootstrap_metric_ci(
    probs,
    labels,
    metric: str = "ece",
    bins: int = 10,
    level: float = 0.95,
    draws: int = 1000,
    seed: int = 0,
) -> IntervalEstimate:
    """Percentile-bootstrap CI of one metric on a single evaluation set.

    Resamples (prob, label) pairs with replacement ``draws`` times; draws
    where the metric is undefined (e.g. a single-class AUC resample) are
    skipped.  The interval is widened, if needed, to contain the full-data
    point estimate.
    """
    from . import metrics as _metrics

    evaluators = {
        "ece": lambda p, y: _metrics.ece(p, y, bins=bins),
        "mce": lambda p, y: _metrics.mce(p, y, bins=bins),
        "brier": _metrics.brier,
        "log_loss": _metrics.log_loss,
        "auc": _metrics.auc,
        "reliability": lambda p, y: 1.0 - _metrics.ece(p, y, bins=bins),
    }
    if metric not in evaluators:
        raise ValueError(
            f"unknown metric {metric!r}; valid: {', '.join(sorted(evaluators))}"
        )
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    evaluate = evaluators[metric]
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels)
    point = float(evaluate(p, y))
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(draws):
        idx = rng.integers(0, p.size, size=p.size)
        try:
            samples.append(float(evaluate(p[idx], y[idx])))
        except Exception:
            continue
    if not samples:
        raise ValueError(f"metric {metric!r} was undefined on every bootstrap draw")
    tail = 0.5 * (1.0 - level)
    lower, upper = np.quantile(samples, [tail, 1.0 - tail])
    return IntervalEstimate(
        mean=point,
        lower=min(float(lower), point),
        upper=max(float(upper), point),
        level=level,
    )


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _float_out(value: float):
    value = float(value)
    return None if math.isnan(value) else value


def _float_in(value) -> float:
    return float("nan") if value is None else float(value)


def config_to_json(config: ExperimentConfig) -> dict:
    if isinstance(config.source, SyntheticConfig):
        source = {
            "synthetic": {
                "n": config.source.n,
                "d": config.source.d,
                "seed": config.source.seed,
            }
        }
    elif isinstance(config.source, CsvSource):
        source = {"csv": {"path": config.source.path, "label_column": config.source.label_column}}
    else:
        source = {
            "scores": {
                "entries": [
                    {"cal": e.cal, "test": e.test} for e in config.source.entries
                ]
            }
        }
    if isinstance(config.model, LogregSpec):
        model = {"logreg": {"C": config.model.C}}
    elif isinstance(config.model, ForestSpec):
        model = {"forest": {"trees": config.model.trees, "depth": config.model.depth}}
    else:
        model = {"external": {}}
    feature_mode = (
        config.feature_mode
        if isinstance(config.feature_mode, str)
        else list(config.feature_mode)
    )
    return {
        "source": source,
        "model": model,
        "methods": list(config.methods),
        "feature_mode": feature_mode,
        "folds": config.folds,
        "repeats": config.repeats,
        "bins": config.bins,
        "base_seed": config.base_seed,
        "family_alpha": config.family_alpha,
    }


def config_from_json(payload: dict) -> ExperimentConfig:
    source_spec = payload["source"]
    if "synthetic" in source_spec:
        body = source_spec["synthetic"]
        source = SyntheticConfig(int(body["n"]), int(body["d"]), int(body["seed"]))
    elif "csv" in source_spec:
        body = source_spec["csv"]
        source = CsvSource(str(body["path"]), str(body.get("label_column", "y")))
    elif "scores" in source_spec:
        body = source_spec["scores"]
        source = ScoreFileSource(
            tuple(
                ScoreFilePair(test=str(e["test"]), cal=None if e.get("cal") is None else str(e["cal"]))
                for e in body["entries"]
            )
        )
    else:
        raise ValueError(
            f"unknown data source {sorted(source_spec)!r}; valid: synthetic, csv, scores"
        )
    model_spec = payload["model"]
    if "logreg" in model_spec:
        model = LogregSpec(C=float(model_spec["logreg"].get("C", 1.0)))
    elif "forest" in model_spec:
        body = model_spec["forest"]
        model = ForestSpec(trees=int(body.get("trees", 100)), depth=int(body.get("depth", 10)))
    elif "external" in model_spec:
        model = ExternalSpec()
    else:
        raise ValueError(
            f"unknown model spec {sorted(model_spec)!r}; valid: logreg, forest, external"
        )
    feature_mode = payload.get("feature_mode", "full")
    if not isinstance(feature_mode, str):
        feature_mode = tuple(int(i) for i in feature_mode)
    return ExperimentConfig(
        source=source,
        model=model,
        methods=tuple(payload.get("methods", METHODS)),
        feature_mode=feature_mode,
        folds=int(payload.get("folds", 5)),
        repeats=int(payload.get("repeats", 10)),
        bins=int(payload.get("bins", 10)),
        base_seed=int(payload.get("base_seed", 0)),
        family_alpha=float(payload.get("family_alpha", 0.05)),
    )


def _report_to_json(report: MetricReport) -> dict:
    return {
        "ece": _float_out(report.ece),
        "mce": _float_out(report.mce),
        "brier": _float_out(report.brier),
        "log_loss": _float_out(report.log_loss),
        "auc": _float_out(report.auc),
        "reliability": _float_out(report.reliability),
        "hl_statistic": _float_out(report.hl_statistic),
        "hl_p_value": _float_out(report.hl_p_value),
        "n": report.n,
        "bin_count": report.bin_count,
    }


def _report_from_json(body: dict) -> MetricReport:
    return MetricReport(
        ece=_float_in(body["ece"]),
        mce=_float_in(body["mce"]),
        brier=_float_in(body["brier"]),
        log_loss=_float_in(body["log_loss"]),
        auc=_float_in(body["auc"]),
        reliability=_float_in(body["reliability"]),
        hl_statistic=_float_in(body["hl_statistic"]),
        hl_p_value=_float_in(body["hl_p_value"]),
        n=int(body["n"]),
        bin_count=int(body["bin_count"]),
    )


def table_to_json(table: ResultTable) -> dict:
    """JSON-ready dict form of a ResultTable (schema version 1)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "config": config_to_json(table.config),
        "records": [
            {
                "repeat": r.repeat,
                "fold": r.fold,
                "model_name": r.model_name,
                "method_name": r.method_name,
                "metrics": _report_to_json(r.metrics),
            }
            for r in table.records
        ],
        "aggregates": [
            {
                "model_name": a.model_name,
                "method_name": a.method_name,
                "metric": a.metric,
                "mean": _float_out(a.mean),
                "sd": _float_out(a.sd),
                "ci_lower": _float_out(a.ci_lower),
                "ci_upper": _float_out(a.ci_upper),
                "runs": a.runs,
            }
            for a in table.aggregates
        ],
        "comparisons": [
            {
                "metric": c.metric,
                "name_a": c.result.name_a,
                "name_b": c.result.name_b,
                "mean_diff": _float_out(c.result.mean_diff),
                "t_statistic": _float_out(c.result.t_statistic),
                "df": c.result.df,
                "p_value": _float_out(c.result.p_value),
                "cohens_d": _float_out(c.result.cohens_d),
                "significant_at_corrected_alpha": c.result.significant_at_corrected_alpha,
                "degenerate": c.result.degenerate,
            }
            for c in table.comparisons
        ],
        "comparison_metrics": list(table.comparison_metrics),
        "bonferroni_threshold": (
            None if table.bonferroni_threshold is None else table.bonferroni_threshold
        ),
    }


def table_from_json(payload: dict) -> ResultTable:
    """Inverse of :func:`table_to_json`, with schema checking."""
    if not isinstance(payload, dict) or "records" not in payload:
        raise SchemaVersionMismatchError(
            "not a results file: top-level 'records' key is missing"
        )
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchError(
            f"results file has schema_version {version!r}; this library reads "
            f"{SCHEMA_VERSION!r}"
        )
    config = config_from_json(payload["config"])
    records = tuple(
        RunRecord(
            repeat=int(r["repeat"]),
            fold=int(r["fold"]),
            model_name=str(r["model_name"]),
            method_name=str(r["method_name"]),
            metrics=_report_from_json(r["metrics"]),
        )
        for r in payload["records"]
    )
    aggregates = tuple(
        AggregateRow(
            model_name=str(a["model_name"]),
            method_name=str(a["method_name"]),
            metric=str(a["metric"]),
            mean=_float_in(a["mean"]),
            sd=_float_in(a["sd"]),
            ci_lower=_float_in(a["ci_lower"]),
            ci_upper=_float_in(a["ci_upper"]),
            runs=int(a["runs"]),
        )
        for a in payload["aggregates"]
    )
    comparisons = tuple(
        ComparisonRow(
            metric=str(c["metric"]),
            result=PairedComparison(
                name_a=str(c["name_a"]),
                name_b=str(c["name_b"]),
                mean_diff=_float_in(c["mean_diff"]),
                t_statistic=_float_in(c["t_statistic"]),
                df=int(c["df"]),
                p_value=_float_in(c["p_value"]),
                cohens_d=_float_in(c["cohens_d"]),
                significant_at_corrected_alpha=bool(c["significant_at_corrected_alpha"]),
                degenerate=bool(c["degenerate"]),
            ),
        )
        for c in payload["comparisons"]
    )
    threshold = payload.get("bonferroni_threshold")
    return ResultTable(
        config=config,
        records=records,
        aggregates=aggregates,
        comparisons=comparisons,
        comparison_metrics=tuple(payload.get("comparison_metrics", ())),
        bonferroni_threshold=None if threshold is None else float(threshold),
    )


def save_results(table: ResultTable, path: str) -> None:
    """Write a ResultTable as JSON; a reload reproduces it exactly
    (floats keep full precision, NaN is stored as null)."""
    with open(path, "w") as handle:
        json.dump(table_to_json(table), handle, indent=2, allow_nan=False)
        handle.write("\n")


def load_results(path: str) -> ResultTable:
    """Read a ResultTable written by :func:`save_results`."""
    with open(path, "r") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaVersionMismatchError(f"{path}: not valid JSON ({exc})") from None
    return table_from_json(payload)
