"""Richardson extrapolation for finite-difference estimates.

All derivative estimates in the package share one convention: a halving
step sequence h0, h0/2, h0/4, ... and a two-level Richardson table.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Extrapolation:
    value: float
    error_estimate: float
    #: raw samples f(h0), f(h0/2), ... before extrapolation
    samples: tuple[float, ...]
    #: successive best-column entries of the table; monotone shrinkage of
    #: their differences signals a trustworthy extrapolation
    monotone: bool


def richardson(samples, leading_order: int, order_step: int = 1, ratio: float = 2.0) -> Extrapolation:
    """Extrapolate a sequence f(h0), f(h0/ratio), ... to h -> 0.

    Assumes an error expansion f(h) = f + c1 h^p + c2 h^(p+q) + ... with
    p = leading_order and q = order_step (q = 2 for central differences,
    q = 1 for one-sided estimators).
    """
    vals = [float(v) for v in samples]
    n = len(vals)
    if n < 2:
        raise ValueError("richardson needs at least two samples")
    table = [vals]
    for j in range(1, n):
        power = leading_order + (j - 1) * order_step
        factor = ratio**power
        prev = table[-1]
        table.append([(factor * prev[i + 1] - prev[i]) / (factor - 1.0) for i in range(n - j)])
    best = table[-1][0]
    # differences between successive diagonal entries
    diag = [table[j][-1] for j in range(n)]
    steps = [abs(diag[j + 1] - diag[j]) for j in range(n - 1)]
    monotone = all(steps[i + 1] <= steps[i] + 1e-300 for i in range(len(steps) - 1))
    err = steps[-1] if steps else float("inf")
    return Extrapolation(value=best, error_estimate=err, samples=tuple(vals), monotone=monotone)


def second_derivative(f, h0: float, levels: int = 2) -> Extrapolation:
    """Central second derivative of f at 0 with Richardson refinement.

    Uses (f(h) - 2 f(0) + f(-h)) / h^2 at steps h0, h0/2, ..., whose error
    expansion is even in h.
    """
    if h0 <= 0:
        raise ValueError("step must be positive")
    f0 = f(0.0)
    samples = []
    for k in range(levels + 1):
        h = h0 / 2.0**k
        samples.append((f(h) - 2.0 * f0 + f(-h)) / h**2)
    return richardson(samples, leading_order=2, order_step=2)


def matrix_derivative(f, h0: float, levels: int = 2) -> np.ndarray:
    """Central first derivative of a matrix-valued function at 0, extrapolated.

    Richardson is applied entrywise; the error series of the central
    difference is even in h.
    """
    if h0 <= 0:
        raise ValueError("step must be positive")
    samples = []
    for k in range(levels + 1):
        h = h0 / 2.0**k
        samples.append((f(h) - f(-h)) / (2.0 * h))
    table = list(samples)
    n = len(table)
    for j in range(1, n):
        factor = 2.0 ** (2 * j)
        table = [(factor * table[i + 1] - table[i]) / (factor - 1.0) for i in range(len(table) - 1)]
    return table[0]
