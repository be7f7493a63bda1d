"""Average fidelity amplitude <f(t)> = Tr[U1^-t U0^t] / N and pure-state echoes."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.fft as sfft

from nmtorus.errors import ValidationError
from nmtorus.maps import MapPair
from nmtorus.torus import TorusState

# Fixed so that partial sums, and hence results, do not depend on the worker count.
BLOCK_ROWS = 128


@dataclass(frozen=True)
class EchoSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.complex128)
        if times.shape != values.shape or times.ndim != 1:
            raise ValidationError("times and values must be 1-d vectors of equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def horizon(self) -> int:
        return int(self.times[-1])

    def __len__(self):
        return self.times.size


def _initial_rows(dim: int, start: int, stop: int, basis: str) -> np.ndarray:
    rows = np.zeros((stop - start, dim), dtype=np.complex128)
    rows[np.arange(stop - start), np.arange(start, stop)] = 1.0
    if basis == "position":
        return rows
    if basis == "momentum":
        return sfft.ifft(rows, axis=-1, norm="ortho")
    raise ValidationError(f"unknown basis {basis!r}")


def _block_overlaps(pair: MapPair, start: int, stop: int, horizon: int, basis: str) -> np.ndarray:
    """sum_n <phi_n(t)|psi_n(t)> over basis states start..stop-1, for t = 0..horizon."""
    psi = _initial_rows(pair.dim, start, stop, basis)
    phi = psi.copy()
    out = np.empty(horizon + 1, dtype=np.complex128)
    out[0] = np.vdot(phi, psi)
    for t in range(1, horizon + 1):
        psi = pair.u0.evolve(psi)
        phi = pair.u1.evolve(phi)
        out[t] = np.vdot(phi, psi)
    return out


def afa_series(pair: MapPair, horizon: int, workers: int | None = 1, basis: str = "position") -> EchoSeries:
    """Exact average fidelity amplitude over a complete orthonormal basis.

    All N basis states are evolved under both maps, in blocks of
    ``BLOCK_ROWS`` states. Blocks run on ``workers`` threads (``None`` means
    all cores) and their partial traces are added in block order.
    """
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")
    params = dict(pair.params, horizon=horizon, basis=basis)
    if pair.identical:
        return EchoSeries(np.arange(horizon + 1), np.ones(horizon + 1, dtype=np.complex128), pair.label, params)
    dim = pair.dim
    bounds = [(s, min(s + BLOCK_ROWS, dim)) for s in range(0, dim, BLOCK_ROWS)]
    workers = (os.cpu_count() or 1) if workers is None else max(1, int(workers))
    if workers == 1 or len(bounds) == 1:
        partials = [_block_overlaps(pair, s, e, horizon, basis) for s, e in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda b: _block_overlaps(pair, b[0], b[1], horizon, basis), bounds))
    total = np.zeros(horizon + 1, dtype=np.complex128)
    for part in partials:
        total += part
    values = total / dim
    values[0] = 1.0
    return EchoSeries(np.arange(horizon + 1), values, pair.label, params)


def echo_amplitude_pure(pair: MapPair, psi: TorusState, horizon: int) -> EchoSeries:
    """<psi|U1^-t U0^t|psi>; its squared modulus is the Loschmidt echo."""
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")
    if psi.dim != pair.dim:
        raise ValidationError(f"state dim {psi.dim} does not match map dim {pair.dim}")
    if abs(psi.norm() - 1.0) > 1e-8:
        raise ValidationError(f"state must be normalized, norm is {psi.norm():.12g}")
    a = psi.amplitudes
    b = a.copy()
    values = np.empty(horizon + 1, dtype=np.complex128)
    values[0] = 1.0
    for t in range(1, horizon + 1):
        a = pair.u0.evolve(a)
        b = pair.u1.evolve(b)
        values[t] = np.vdot(b, a)
    params = dict(pair.params, horizon=horizon, initial="pure")
    return EchoSeries(np.arange(horizon + 1), values, pair.label, params)


def _window_indices(series: EchoSeries, window: tuple[int, int]) -> np.ndarray:
    lo, hi = int(window[0]), int(window[1])
    if lo < series.times[0] or hi > series.times[-1] or hi < lo:
        raise ValidationError(f"window [{lo}, {hi}] outside series range [{series.times[0]}, {series.times[-1]}]")
    return np.flatnonzero((series.times >= lo) & (series.times <= hi))


def fit_decay_rate(series: EchoSeries, window: tuple[int, int] | None = None, ehrenfest: float | None = None) -> float:
    """Exponential decay rate: minus the least-squares slope of ln|f(t)|.

    The default window is [1, min(5, t_E)] (t_E rounded down), which must
    still contain three points.
    """
    if window is None:
        hi = 5 if ehrenfest is None else min(5, math.floor(ehrenfest))
        window = (1, min(hi, series.horizon))
    idx = _window_indices(series, window)
    if idx.size < 3:
        raise ValidationError(f"decay fit needs at least 3 points, window {window} has {idx.size}")
    mag = series.abs[idx]
    if np.any(mag == 0):
        raise ValidationError("|f| vanishes inside the fit window")
    slope = np.polyfit(series.times[idx].astype(float), np.log(mag), 1)[0]
    return float(-slope)


class SaturationStats(NamedTuple):
    mean: float
    variance: float


def saturation_stats(series: EchoSeries, tail_start: int) -> SaturationStats:
    """Mean and variance of |f(t)| for t >= tail_start."""
    tail = series.abs[series.times >= tail_start]
    if tail.size == 0:
        raise ValidationError(f"no samples at or after t={tail_start}")
    return SaturationStats(float(tail.mean()), float(tail.var()))
