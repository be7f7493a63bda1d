"""Figure-level analytics: tail slopes of M(t), slope scaling with N, k scans."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from nmtorus.echo import EchoSeries, afa_series
from nmtorus.errors import ValidationError
from nmtorus.maps import (
    HarperParams,
    MapPair,
    PcmParams,
    coupling_from_hbar_units,
    ehrenfest_time,
    harper_pair,
    pcm_lyapunov,
    pcm_pair,
)
from nmtorus.nonmarkov import NmSeries, nm_series


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    window: tuple[int, int]
    residual: float


def fit_tail_slope(series, window: tuple[int, int]) -> SlopeFit:
    """Least-squares line through M(t) for t in the closed ``window``."""
    if isinstance(series, NmSeries):
        times, values = np.asarray(series.times), np.asarray(series.m_values)
    else:
        values = np.asarray(series, dtype=np.float64)
        times = np.arange(values.size)
    lo, hi = int(window[0]), int(window[1])
    if lo < times[0] or hi > times[-1] or hi < lo:
        raise ValidationError(f"window [{lo}, {hi}] outside series range [{times[0]}, {times[-1]}]")
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 3:
        raise ValidationError("slope fit needs at least 3 points")
    t = times[mask].astype(np.float64)
    y = values[mask]
    tc = t - t.mean()
    slope = float(np.dot(tc, y - y.mean()) / np.dot(tc, tc))
    intercept = float(y.mean() - slope * t.mean())
    residual = float(np.sqrt(np.mean((y - (intercept + slope * t)) ** 2)))
    return SlopeFit(slope, intercept, (lo, hi), residual)


def default_tail_window(n: int, lyapunov: float, horizon: int) -> tuple[int, int]:
    """[ceil(2 t_E), horizon]; only defined for chaotic dynamics."""
    return math.ceil(2 * ehrenfest_time(n, lyapunov)), horizon


def build_pair(family: str, n: int, params: dict, delta: float) -> MapPair:
    if family == "pcm":
        return pcm_pair(PcmParams(params["a"], params.get("K", 0.0), n), delta)
    if family == "harper":
        k = params["k"]
        return harper_pair(HarperParams(k, params.get("k_prime", k), n), delta)
    raise ValidationError(f"unknown map family {family!r}")


def run_nm(pair: MapPair, horizon: int, workers: int | None = 1) -> tuple[EchoSeries, NmSeries]:
    echo = afa_series(pair, horizon, workers=workers)
    return echo, nm_series(echo)


def slope_vs_n(
    family: str,
    params: dict,
    n_list,
    window_rule: Callable[[int], tuple[int, int]] | tuple[int, int] | None = None,
    *,
    delta_over_hbar: float | None = None,
    delta: float | None = None,
    horizon: int = 200,
    workers: int | None = 1,
) -> list[tuple[int, SlopeFit]]:
    """Tail slope of M(t) for each N.

    Give the coupling as ``delta_over_hbar`` (held fixed in units of hbar
    across N) or as a raw ``delta``. Without a window rule the PCM uses
    :func:`default_tail_window`; the Harper map needs an explicit one.
    """
    if (delta_over_hbar is None) == (delta is None):
        raise ValidationError("give exactly one of delta_over_hbar and delta")
    out = []
    for n in n_list:
        if n < 128 or n & (n - 1):
            raise ValidationError(f"N must be a power of two >= 128, got {n}")
        try:
            d = coupling_from_hbar_units(delta_over_hbar, n) if delta is None else delta
            if callable(window_rule):
                window = window_rule(n)
            elif window_rule is not None:
                window = tuple(window_rule)
            elif family == "pcm":
                window = default_tail_window(n, pcm_lyapunov(params["a"]), horizon)
            else:
                raise ValidationError("a tail window is required for maps without a known Lyapunov exponent")
            _, nm = run_nm(build_pair(family, n, params, d), horizon, workers)
            out.append((n, fit_tail_slope(nm, window)))
        except Exception as exc:
            raise RuntimeError(f"slope run failed at N={n}: {exc}") from exc
    return out


@dataclass
class ScanResult:
    parameter: str
    grid: np.ndarray
    values: np.ndarray
    errors: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValidationError("grid and values differ in length")
        if not self.errors:
            self.errors = [""] * len(self.grid)

    @property
    def failed(self) -> int:
        return sum(1 for e in self.errors if e)


def m_vs_k_scan(
    k_grid,
    n: int,
    delta_k: float,
    eval_time: int = 20,
    k_prime: float | None = None,
    workers: int | None = None,
) -> ScanResult:
    """M(eval_time) of the Harper pair for every k in ``k_grid``.

    ``k_prime`` defaults to k at each point. Points run in parallel and a
    failing point is recorded as NaN with its error message.
    """
    grid = np.asarray(list(k_grid), dtype=np.float64)
    if grid.size == 0:
        raise ValidationError("k grid is empty")
    if eval_time < 1:
        raise ValidationError("eval_time must be >= 1")

    def point(k):
        try:
            kp = k if k_prime is None else k_prime
            _, nm = run_nm(harper_pair(HarperParams(k, kp, n), delta_k), eval_time)
            return float(nm.m_values[-1]), ""
        except Exception as exc:
            return math.nan, f"{type(exc).__name__}: {exc}"

    workers = (os.cpu_count() or 1) if workers is None else max(1, int(workers))
    if workers == 1:
        results = [point(k) for k in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    meta = {"family": "harper", "N": n, "delta": delta_k, "eval_time": eval_time, "k_prime": k_prime}
    return ScanResult("k", grid, np.array([r[0] for r in results]), [r[1] for r in results], meta)
