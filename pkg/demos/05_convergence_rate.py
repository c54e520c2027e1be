"""Measure how fast isotonic calibration converges to the truth.

For a known monotone truth g*, the study draws n scores, fits the
isotonic map, and measures the mean absolute error against g* on a fresh
evaluation sample.  Isotonic regression's risk shrinks on the order of
n^(-1/3), so the log-log plot of error against n is near-linear with
slope about -1/3 — slower than parametric rates, the price of assuming
nothing but monotonicity.

Run: python3 demos/05_convergence_rate.py
"""

import numpy as np

from calibench.harness import run_convergence_study


def main():
    study = run_convergence_study(
        g_star=lambda s: np.asarray(s, dtype=np.float64),
        sizes=(100, 500, 2500, 12500),
        trials=10,
        seed=0,
    )
    print("samples   mean |fit - truth|")
    for n, err in zip(study.sizes, study.mean_errors):
        print(f"{n:7d}   {err:.5f}")
    print(f"\nlog-log slope: {study.slope:.3f} "
          f"(n^(-1/3) predicts about -0.33)")

    # each size averages several independent trials
    spreads = study.trial_errors.std(axis=1, ddof=1)
    print(f"per-size trial sd: "
          f"{', '.join(f'{s:.5f}' for s in spreads)}")

    # quadrupling the data should cut the error by about 4^(1/3) ~ 1.6x
    for i in range(len(study.sizes) - 1):
        factor = study.mean_errors[i] / study.mean_errors[i + 1]
        print(f"error ratio {study.sizes[i]} -> {study.sizes[i + 1]}: "
              f"{factor:.2f}x")


if __name__ == "__main__":
    main()
