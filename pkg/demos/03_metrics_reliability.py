"""Tour of the calibration metrics and the reliability diagram.

A reliability diagram bins predictions by confidence and compares each
bin's mean confidence against its empirical accuracy; ECE is the
count-weighted mean gap and MCE the largest gap.  This script prints the
diagram for over-confident predictions, the full metric report before and
after isotonic calibration, and a bootstrap confidence interval for ECE.

Run: python3 demos/03_metrics_reliability.py
"""

import numpy as np

from calibench.calibrators import ScoreSet, apply_map, fit_isotonic
from calibench.harness import bootstrap_metric_ci
from calibench.metrics import metric_report, reliability_bins


def print_diagram(probs, labels, bins=10):
    stats = reliability_bins(probs, labels, bins=bins)
    print("bin         count   confidence   accuracy   gap")
    for i in range(bins):
        lo, hi = stats.bin_edges[i], stats.bin_edges[i + 1]
        count = int(stats.counts[i])
        if count == 0:
            print(f"[{lo:.1f}, {hi:.1f})     0       -            -          -")
            continue
        conf = stats.mean_confidence[i]
        acc = stats.empirical_accuracy[i]
        print(f"[{lo:.1f}, {hi:.1f}) {count:6d}       {conf:.3f}        "
              f"{acc:.3f}      {abs(acc - conf):+.3f}")


def print_report(title, report):
    print(f"\n{title}")
    print(f"  ece {report.ece:.4f}   mce {report.mce:.4f}   "
          f"reliability {report.reliability:.4f}")
    print(f"  brier {report.brier:.4f}   log loss {report.log_loss:.4f}   "
          f"auc {report.auc:.4f}")
    print(f"  goodness-of-fit: chi2 {report.hl_statistic:.2f} "
          f"(p = {report.hl_p_value:.3g})")


def main():
    rng = np.random.default_rng(3)
    truth = rng.random(4000)
    labels = (rng.random(4000) < truth).astype(np.int64)
    probs = np.sqrt(truth)  # over-confident: predictions exceed the truth

    print("reliability diagram of over-confident predictions "
          "(accuracy below confidence):\n")
    print_diagram(probs, labels)
    print_report("before calibration:", metric_report(probs, labels))

    # fit on one half, evaluate on the other
    fit_half, eval_half = np.arange(0, 4000, 2), np.arange(1, 4000, 2)
    iso = fit_isotonic(ScoreSet(probs[fit_half], labels[fit_half]))
    calibrated = apply_map(iso, probs[eval_half])
    print_report(
        "after isotonic calibration (held-out half):",
        metric_report(calibrated, labels[eval_half]),
    )

    interval = bootstrap_metric_ci(
        calibrated, labels[eval_half], metric="ece", seed=0
    )
    print(f"\nheld-out ece {interval.mean:.4f}, "
          f"95% bootstrap CI [{interval.lower:.4f}, {interval.upper:.4f}]")

    # AUC measures ranking, not calibration: it is unchanged by the map
    before = metric_report(probs[eval_half], labels[eval_half]).auc
    after = metric_report(calibrated, labels[eval_half]).auc
    print(f"auc before {before:.4f} vs after {after:.4f} "
          f"(monotone maps never change ranking)")


if __name__ == "__main__":
    main()
