"""Independent reference implementations used to check the library.

Everything here is deliberately brute force: exhaustive enumeration and
per-sample Python loops, sharing no code with the package under test.
"""

import numpy as np


def brute_force_isotonic(scores, labels):
    """Exhaustive monotone least-squares fit.

    Groups tied scores, then enumerates every contiguous partition of the
    distinct scores into blocks (2^(k-1) of them); each block is assigned
    its weighted label mean; partitions whose block values are not
    non-decreasing are infeasible; the feasible partition with minimal
    squared error is the isotonic solution (it is unique in the fitted
    values).  Only usable for tiny inputs.

    Returns (distinct_scores, fitted_value_per_distinct_score).
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    order = np.argsort(scores, kind="mergesort")
    ss, ys = scores[order], labels[order]

    knots, sums, counts = [], [], []
    for s, y in zip(ss, ys):
        if knots and knots[-1] == s:
            sums[-1] += y
            counts[-1] += 1
        else:
            knots.append(s)
            sums.append(y)
            counts.append(1)
    k = len(knots)

    best_sse = None
    best_values = None
    for mask in range(1 << (k - 1)):
        # bit i set => block boundary between distinct scores i and i+1
        values = []
        feasible = True
        sse = 0.0
        prev = -np.inf
        start = 0
        for i in range(k):
            if i == k - 1 or (mask >> i) & 1:
                total = sum(sums[start : i + 1])
                count = sum(counts[start : i + 1])
                v = total / count
                if v < prev - 1e-12:
                    feasible = False
                    break
                prev = v
                # labels are 0/1, so sum of y^2 equals sum of y
                sse += v * v * count - 2.0 * v * total + total
                values.extend([v] * (i + 1 - start))
                start = i + 1
        if feasible and (best_sse is None or sse < best_sse - 1e-12):
            best_sse = sse
            best_values = values
    return np.array(knots), np.array(best_values)


def slow_reliability(probs, labels, bins):
    """Per-sample linear-scan binning: bin m covers [m/bins, (m+1)/bins),
    last bin closed at 1.  Returns (counts, confidences, accuracies), the
    latter two holding None for empty bins."""
    counts = [0] * bins
    prob_sums = [0.0] * bins
    label_sums = [0.0] * bins
    for p, y in zip(probs, labels):
        b = bins - 1
        for m in range(bins):
            if m / bins <= p < (m + 1) / bins:
                b = m
                break
        counts[b] += 1
        prob_sums[b] += p
        label_sums[b] += y
    conf = [prob_sums[m] / counts[m] if counts[m] else None for m in range(bins)]
    acc = [label_sums[m] / counts[m] if counts[m] else None for m in range(bins)]
    return counts, conf, acc


def slow_ece(probs, labels, bins):
    counts, conf, acc = slow_reliability(probs, labels, bins)
    n = sum(counts)
    return sum(
        counts[m] / n * abs(acc[m] - conf[m]) for m in range(bins) if counts[m]
    )


def slow_mce(probs, labels, bins):
    counts, conf, acc = slow_reliability(probs, labels, bins)
    return max(abs(acc[m] - conf[m]) for m in range(bins) if counts[m])


def slow_auc(scores, labels):
    """Pair-counting AUC: fraction of (positive, negative) pairs ranked
    correctly, ties counting 1/2."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))
