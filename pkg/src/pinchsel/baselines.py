"""Reference solvers: exhaustive subset search and a greedy baseline.

``brute_force_select`` is the exactness oracle. It walks all non-empty
activation masks in Gray-code order so each step updates the accumulated
signal with a single complex add or subtract, keeps a shortlist of
near-maximal masks, and rescores the shortlist in canonical order at the end;
the reported optimum is therefore immune to drift accumulated along the walk
and directly comparable (bit-for-bit) with the trellis solver's output.

``greedy_pgga_select`` reconstructs a projection-guided forward-selection
baseline: grow the active set from the best singleton, each round adding the
antenna whose gain projects best onto the worst user's current signal
direction, stopping at the first non-improving step. It follows a single
refinement trajectory by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, as_gains
from .metric import ActivationVector, accumulated_signal, maxmin_metric

BRUTE_FORCE_CAP = 22

# Relative slack used to shortlist near-maximal masks during the Gray walk;
# generously wider than any drift the incremental updates can accumulate.
_SHORTLIST_RTOL = 1e-9


@dataclass(frozen=True)
class SolverResult:
    activation: ActivationVector
    metric: float
    evaluations: int
    solver_name: str


def _mask_to_activation(mask: int, n_antennas: int) -> ActivationVector:
    return ActivationVector(tuple((mask >> i) & 1 for i in range(n_antennas)))


def _tie_key(metric: float, activation: ActivationVector) -> tuple:
    # maximise metric; break ties by fewer active antennas, then by the
    # lexicographically smallest mask sequence
    return (-metric, activation.active_count, activation.mask)


def brute_force_select(
    B: "ChannelMatrix | np.ndarray",
    max_antennas: int = BRUTE_FORCE_CAP,
    method: str = "gray",
) -> SolverResult:
    """Enumerate every non-empty activation and return the max-min optimum.

    ``method="gray"`` is the fast incremental walk; ``method="naive"``
    rescores every subset from scratch and exists to validate the walk.
    """
    gains = as_gains(B)
    n_users, n_antennas = gains.shape
    if n_antennas > max_antennas:
        raise ValueError(
            f"refusing exhaustive search over {n_antennas} antennas "
            f"(cap is {max_antennas}): 2^N subsets"
        )
    if method == "naive":
        return _brute_force_naive(gains, n_antennas)
    if method != "gray":
        raise ValueError(f"unknown method {method!r}")

    cols = [tuple(gains[:, j].tolist()) for j in range(n_antennas)]
    z = [0j] * n_users
    gray = 0
    count = 0
    best = -math.inf
    shortlist: list[tuple[int, float]] = []  # (mask, incremental metric)
    for k in range(1, 1 << n_antennas):
        flip = (k & -k).bit_length() - 1
        bit = 1 << flip
        gray ^= bit
        col = cols[flip]
        if gray & bit:
            count += 1
            for m in range(n_users):
                z[m] += col[m]
        else:
            count -= 1
            for m in range(n_users):
                z[m] -= col[m]
        worst = math.inf
        for zm in z:
            p = zm.real * zm.real + zm.imag * zm.imag
            if p < worst:
                worst = p
        metric = worst / count
        if metric > best:
            best = metric
            floor = best * (1.0 - _SHORTLIST_RTOL)
            shortlist = [(s, sm) for s, sm in shortlist if sm >= floor]
            shortlist.append((gray, metric))
        elif metric >= best * (1.0 - _SHORTLIST_RTOL):
            shortlist.append((gray, metric))

    # rescore the near-maximal masks in canonical order; exact ties resolved
    # by the deterministic key
    floor = best * (1.0 - _SHORTLIST_RTOL)
    candidates = []
    for mask, inc_metric in shortlist:
        if inc_metric < floor:
            continue
        activation = _mask_to_activation(mask, n_antennas)
        candidates.append((maxmin_metric(gains, activation), activation))
    metric, activation = min(candidates, key=lambda c: _tie_key(c[0], c[1]))
    return SolverResult(
        activation=activation,
        metric=metric,
        evaluations=(1 << n_antennas) - 1,
        solver_name="brute_force",
    )


def _brute_force_naive(gains: np.ndarray, n_antennas: int) -> SolverResult:
    best: tuple | None = None
    for mask in range(1, 1 << n_antennas):
        activation = _mask_to_activation(mask, n_antennas)
        metric = maxmin_metric(gains, activation)
        key = _tie_key(metric, activation)
        if best is None or key < best[0]:
            best = (key, metric, activation)
    assert best is not None
    return SolverResult(
        activation=best[2],
        metric=best[1],
        evaluations=(1 << n_antennas) - 1,
        solver_name="brute_force",
    )


def best_singleton(B: "ChannelMatrix | np.ndarray") -> SolverResult:
    """Best single-antenna activation (lower-bound reference)."""
    gains = as_gains(B)
    n_antennas = gains.shape[1]
    best_metric = -math.inf
    best_index = 0
    for n in range(n_antennas):
        metric = maxmin_metric(gains, ActivationVector.singleton(n_antennas, n))
        if metric > best_metric:
            best_metric = metric
            best_index = n
    return SolverResult(
        activation=ActivationVector.singleton(n_antennas, best_index),
        metric=best_metric,
        evaluations=n_antennas,
        solver_name="best_singleton",
    )


def greedy_pgga_select(B: "ChannelMatrix | np.ndarray") -> SolverResult:
    """Projection-guided greedy activation (reconstructed baseline).

    Start from the best singleton; each round, among the inactive antennas,
    pick the one maximising the worst user's projection
    Re(conj(Z_m / |Z_m|) * B_{m,n}) and keep it only if the max-min metric
    strictly improves. Deterministic, single trajectory.
    """
    gains = as_gains(B)
    n_users, n_antennas = gains.shape

    start = best_singleton(gains)
    activation = start.activation
    metric = start.metric
    evaluations = start.evaluations
    z = accumulated_signal(gains, activation)

    while activation.active_count < n_antennas:
        mag = np.abs(z)
        safe = np.where(mag > 0.0, mag, 1.0)
        directions = np.where(mag > 0.0, z / safe, 1.0 + 0j)
        best_score = -math.inf
        best_index = -1
        for n in range(n_antennas):
            if activation.mask[n]:
                continue
            score = float(np.min((np.conj(directions) * gains[:, n]).real))
            if score > best_score:
                best_score = score
                best_index = n
        candidate = activation.with_added(best_index)
        candidate_metric = maxmin_metric(gains, candidate)
        evaluations += 1
        if candidate_metric <= metric:
            break
        activation = candidate
        metric = candidate_metric
        z = accumulated_signal(gains, activation)

    return SolverResult(
        activation=activation,
        metric=metric,
        evaluations=evaluations,
        solver_name="pgga",
    )
