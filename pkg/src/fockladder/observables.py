"""Scalar diagnostics over states and trajectories.

Fock probabilities, Fock-state fidelity, Mandel Q, purity, trace distance
and steady-state detection over sampled observable series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import (
    DensityOperator,
    LayoutError,
    StateVector,
    partial_trace,
)

MEAN_PHOTON_FLOOR = 1e-9


class VacuumDominatedError(ValueError):
    """Mandel Q is undefined for a vanishing mean photon number."""


def _field_populations(state: StateVector | DensityOperator) -> np.ndarray:
    layout = state.layout
    if "field" not in layout.labels:
        raise LayoutError("state has no field factor")
    if isinstance(state, StateVector):
        axis = layout.axis("field")
        probs = np.abs(state.amplitudes.reshape(layout.dims)) ** 2
        return probs.sum(axis=tuple(i for i in range(len(layout.dims)) if i != axis))
    if len(layout.factors) > 1:
        state = partial_trace(state, "field")
    return np.real(np.diag(state.entries))


def fock_probabilities(state: StateVector | DensityOperator, cutoff: int | None = None) -> np.ndarray:
    """P_n of the field factor (atom traced out when present)."""
    pops = _field_populations(state)
    if cutoff is not None:
        pops = pops[: cutoff + 1]
    return pops


def fidelity_fock(rho: StateVector | DensityOperator, n: int) -> float:
    """Overlap with the Fock state |n>: the n-th field population."""
    pops = _field_populations(rho)
    if n >= len(pops):
        raise ValueError(f"Fock index {n} beyond cutoff {len(pops) - 1}")
    return float(pops[n])


def mean_photon(state: StateVector | DensityOperator) -> float:
    pops = _field_populations(state)
    return float(np.arange(len(pops)) @ pops)


def mandel_q(state: StateVector | DensityOperator) -> float:
    """Q = (<n^2> - <n>^2 - <n>) / <n>; -1 for Fock states, 0 for coherent."""
    pops = _field_populations(state)
    n = np.arange(len(pops))
    mean = float(n @ pops)
    if mean < MEAN_PHOTON_FLOOR:
        raise VacuumDominatedError(
            f"mean photon number {mean} below {MEAN_PHOTON_FLOOR}; Q undefined"
        )
    second = float((n ** 2) @ pops)
    return (second - mean ** 2 - mean) / mean


def purity(rho: DensityOperator) -> float:
    return float(np.real(np.trace(rho.entries @ rho.entries)))


def trace_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Half the trace norm of a - b."""
    if a.layout != b.layout:
        raise LayoutError("density operators live on different layouts")
    diff = a.entries - b.entries
    eigvals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(eigvals)))


@dataclass
class ObservableSeries:
    """Sampled named real columns over a common time axis."""

    times: np.ndarray
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} length mismatch")
            self.columns[name] = col

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]


def detect_steady(series: ObservableSeries, window: float, eps: float) -> float | None:
    """Earliest sample time after which every column stays within eps.

    Requires at least one full trailing window of evidence; returns None
    when the series never settles.
    """
    times = series.times
    if times.size == 0:
        raise ValueError("empty series")
    span = times[-1] - times[0]
    if window > span:
        raise ValueError(f"window {window} longer than series span {span}")
    cols = list(series.columns.values())
    for i, t in enumerate(times):
        if times[-1] - t < window:
            break
        tail = slice(i, None)
        if all(np.ptp(c[tail]) < eps for c in cols):
            return float(t)
    return None
