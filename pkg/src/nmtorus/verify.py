"""Small-N oracle checks: every route cross-checked against dense matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nmtorus.echo import afa_series
from nmtorus.errors import SizeGuardError
from nmtorus.maps import MapPair
from nmtorus.nonmarkov import (
    ORACLE_GUARD,
    QubitState,
    channel_from_afa,
    channel_oracle_series,
    reduced_evolution,
    verify_optimal_pair,
)
from nmtorus.torus import TorusState, build_dense

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _check(name: str, error: float, tol: float = TOL) -> CheckResult:
    return CheckResult(name, bool(error <= tol), f"max error {error:.3e} (tol {tol:.0e})")


def run_checks(pair: MapPair, horizon: int = 10, samples: int = 200, seed: int = 0) -> list[CheckResult]:
    if pair.dim > ORACLE_GUARD:
        raise SizeGuardError(f"oracle checks limited to N <= {ORACLE_GUARD}, got {pair.dim}")
    n = pair.dim
    results = []

    dense = [build_dense(pair.u0), build_dense(pair.u1)]
    eye = np.eye(n)
    results.append(_check("dense unitarity", max(np.max(np.abs(u.conj().T @ u - eye)) for u in dense)))

    rng = np.random.default_rng(seed)
    err = 0.0
    for kmap, u in zip((pair.u0, pair.u1), dense):
        block = np.vstack([eye, [TorusState.random(n, rng).amplitudes for _ in range(4)]]).astype(complex)
        ref = block.copy()
        for _ in range(horizon):
            block = kmap.evolve(block)
            ref = ref @ u.T
            err = max(err, float(np.max(np.abs(block - ref))))
    results.append(_check("split-operator vs dense evolution", err))

    echo = afa_series(pair, horizon)
    u0t, u1t = eye.astype(complex), eye.astype(complex)
    err = 0.0
    for t in range(1, horizon + 1):
        u0t, u1t = dense[0] @ u0t, dense[1] @ u1t
        err = max(err, abs(np.trace(u1t.conj().T @ u0t) / n - echo.values[t]))
    results.append(_check("average fidelity amplitude vs dense trace", err))

    channels = channel_oracle_series(pair, horizon)
    results.append(_check("dephasing channel structure", max(ch.dephasing_deviation() for ch in channels)))
    err = max(
        float(np.max(np.abs(ch.matrix - channel_from_afa(f).matrix))) for ch, f in zip(channels, echo.values)
    )
    results.append(_check("channel from f(t) vs joint-evolution channel", err))

    rho0 = QubitState.from_bloch(0.6, -0.3, 0.5)
    states = reduced_evolution(pair, rho0, horizon)
    err = max(
        max(abs(s.rho[0, 1] - f * rho0.rho[0, 1]), abs(s.rho[0, 0] - rho0.rho[0, 0]))
        for s, f in zip(states, echo.values)
    )
    results.append(_check("coherence factorization rho01(t) = f(t) rho01(0)", err))

    report = verify_optimal_pair(pair, horizon, samples, seed)
    results.append(
        CheckResult(
            "optimal pair bound",
            report.passed,
            f"{report.violations}/{samples} sampled pairs exceed bound "
            f"(worst excess {report.worst_excess:.3e}); D(rho+, rho-) - |f| error {report.optimal_pair_error:.3e}",
        )
    )
    return results
