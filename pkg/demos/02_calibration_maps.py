"""Fit the two calibration maps on deliberately miscalibrated scores.

The sample below squares well-calibrated probabilities, producing scores
that are systematically too low.  Platt scaling fits a two-parameter
sigmoid by maximum likelihood; isotonic regression fits a non-decreasing
step function by least squares.  Both are fit on the same data, applied to
a probe grid, and round-tripped through their JSON form.

Run: python3 demos/02_calibration_maps.py
"""

import numpy as np

from calibench.calibrators import (
    ScoreSet,
    apply_map,
    fit_isotonic,
    fit_platt,
    map_from_json,
    map_to_json,
)
from calibench.metrics import ece


def main():
    rng = np.random.default_rng(0)
    truth = rng.random(2000)
    labels = (rng.random(2000) < truth).astype(np.int64)
    scores = truth**2  # systematically under-confident scores
    data = ScoreSet(scores, labels)
    print(f"training data: n={data.n}, raw ece={ece(scores, labels):.4f}")

    platt = fit_platt(data)
    print(f"\nPlatt fit: sigma({platt.A:.3f} * s + {platt.B:+.3f}) "
          f"after {platt.iterations_used} Newton steps")

    iso = fit_isotonic(data)
    print(f"isotonic fit: step function with {iso.knots.size} knots, "
          f"values from {iso.values[0]:.3f} to {iso.values[-1]:.3f}")

    probe = np.array([0.05, 0.25, 0.5, 0.75, 0.95])
    print("\nscore   platt   isotonic   sqrt(score) (ideal)")
    for s, p, i in zip(probe, apply_map(platt, probe), apply_map(iso, probe)):
        print(f"{s:5.2f}   {p:.3f}   {i:.3f}      {np.sqrt(s):.3f}")

    print(f"\ncalibrated ece: platt {ece(apply_map(platt, scores), labels):.4f}, "
          f"isotonic {ece(apply_map(iso, scores), labels):.4f}")

    # maps serialize to plain JSON dicts and reload identically
    payload = map_to_json(platt)
    restored = map_from_json(payload)
    print(f"\nJSON round trip: {payload}")
    print(f"restored map matches: "
          f"{bool(np.all(apply_map(restored, probe) == apply_map(platt, probe)))}")


if __name__ == "__main__":
    main()
