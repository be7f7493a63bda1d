"""Reduced qubit channel, trace distance and the non-Markovianity measure.

Bloch convention: rho = (I + x sx + y sy + z sz) / 2, so the coherence is
rho_01 = (x - i y) / 2. The dephasing channel multiplies rho_01 by f(t).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nmtorus.echo import EchoSeries, afa_series
from nmtorus.errors import SizeGuardError, ValidationError
from nmtorus.maps import MapPair
from nmtorus.torus import build_dense

ORACLE_GUARD = 64

PAULI = (
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


@dataclass(frozen=True)
class QubitState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=np.complex128)
        if rho.shape != (2, 2):
            raise ValidationError(f"qubit density matrix must be 2x2, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > 1e-12:
            raise ValidationError(f"density matrix trace is {np.trace(rho).real:.15g}")
        if np.linalg.eigvalsh(rho)[0] < -1e-10:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "QubitState":
        rho = 0.5 * (PAULI[0] + x * PAULI[1] + y * PAULI[2] + z * PAULI[3])
        # exact Hermiticity regardless of rounding in the products above
        return cls(0.5 * (rho + rho.conj().T))

    @property
    def bloch(self) -> np.ndarray:
        return np.array([2 * self.rho[0, 1].real, -2 * self.rho[0, 1].imag, (self.rho[0, 0] - self.rho[1, 1]).real])


def optimal_pair(a: float = 1.0, b: float = 0.0) -> tuple[QubitState, QubitState]:
    """rho_+- = (I +- (a sx + b sy)) / 2 with a^2 + b^2 = 1."""
    if abs(a * a + b * b - 1) > 1e-12:
        raise ValidationError("optimal pair needs a^2 + b^2 = 1")
    return QubitState.from_bloch(a, b, 0.0), QubitState.from_bloch(-a, -b, 0.0)


@dataclass(frozen=True)
class PauliTransferMatrix:
    """Real 4x4 channel matrix in the basis (I, sx, sy, sz)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (4, 4):
            raise ValidationError(f"Pauli transfer matrix must be 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", np.real_if_close(m).astype(np.float64))

    def apply(self, state: QubitState) -> QubitState:
        out = self.matrix @ np.concatenate([[1.0], state.bloch])
        return QubitState.from_bloch(*out[1:])

    def dephasing_deviation(self) -> float:
        """Largest violation of the dephasing form (zero for an exact dephasing channel)."""
        m = self.matrix
        checks = [
            m[0, 0] - 1,
            m[3, 3] - 1,
            *m[0, 1:],
            *m[1:, 0],
            m[3, 1],
            m[3, 2],
            m[1, 3],
            m[2, 3],
            m[1, 1] - m[2, 2],
            m[1, 2] + m[2, 1],
        ]
        return float(np.max(np.abs(checks)))

    @property
    def coherence_factor(self) -> complex:
        """The f with rho_01 -> f rho_01, read off the (x, y) block."""
        return complex(self.matrix[1, 1], self.matrix[1, 2])


def channel_from_afa(f: complex) -> PauliTransferMatrix:
    f = complex(f)
    if abs(f) > 1 + 1e-9:
        raise ValidationError(f"|f| = {abs(f):.12g} exceeds 1")
    m = np.eye(4)
    m[1, 1] = m[2, 2] = f.real
    m[1, 2] = f.imag
    m[2, 1] = -f.imag
    return PauliTransferMatrix(m)


def joint_unitaries(pair: MapPair, horizon: int):
    """Yield the dense blocks (U0^t, U1^t) of U(t) = |0><0| U0^t + |1><1| U1^t, t = 0..horizon."""
    if pair.dim > ORACLE_GUARD:
        raise SizeGuardError(f"dense joint evolution limited to N <= {ORACLE_GUARD}, got {pair.dim}")
    step0, step1 = build_dense(pair.u0), build_dense(pair.u1)
    u0 = np.eye(pair.dim, dtype=np.complex128)
    u1 = u0.copy()
    yield u0, u1
    for _ in range(horizon):
        u0 = step0 @ u0
        u1 = step1 @ u1
        yield u0, u1


def _ptm_from_blocks(u0: np.ndarray, u1: np.ndarray) -> PauliTransferMatrix:
    n = u0.shape[0]
    zero = np.zeros_like(u0)
    u = np.block([[u0, zero], [zero, u1]])
    env = np.eye(n) / n
    m = np.empty((4, 4))
    for k, sk in enumerate(PAULI):
        out = u @ np.kron(sk, env) @ u.conj().T
        for j, sj in enumerate(PAULI):
            m[j, k] = 0.5 * np.trace(np.kron(sj, np.eye(n)) @ out).real
    return PauliTransferMatrix(m)


def channel_oracle(pair: MapPair, t: int) -> PauliTransferMatrix:
    """Pauli transfer matrix at step t from the full qubit-environment unitary, rho_env = I/N."""
    if t < 0:
        raise ValidationError("t must be non-negative")
    *_, last = joint_unitaries(pair, t)
    return _ptm_from_blocks(*last)


def channel_oracle_series(pair: MapPair, horizon: int) -> list[PauliTransferMatrix]:
    return [_ptm_from_blocks(u0, u1) for u0, u1 in joint_unitaries(pair, horizon)]


def reduced_evolution(pair: MapPair, rho0: QubitState, horizon: int) -> list[QubitState]:
    """Evolve rho0 (x) I/N with the joint unitary and trace out the environment."""
    n = pair.dim
    initial = np.kron(rho0.rho, np.eye(n) / n)
    states = []
    for u0, u1 in joint_unitaries(pair, horizon):
        zero = np.zeros_like(u0)
        u = np.block([[u0, zero], [zero, u1]])
        full = u @ initial @ u.conj().T
        reduced = np.trace(full.reshape(2, n, 2, n), axis1=1, axis2=3)
        states.append(QubitState(0.5 * (reduced + reduced.conj().T)))
    return states


def trace_distance(r1: QubitState, r2: QubitState) -> float:
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(r1.rho - r2.rho))))


def _abs_f(series) -> np.ndarray:
    if isinstance(series, EchoSeries):
        return series.abs
    return np.abs(np.asarray(series))


def positive_variation(series) -> np.ndarray:
    """Cumulative sum of positive increments of |f(t)|, starting at 0."""
    mag = _abs_f(series)
    out = np.zeros(mag.size)
    out[1:] = np.cumsum(np.maximum(0.0, np.diff(mag)))
    return out


@dataclass(frozen=True)
class NmSeries:
    times: np.ndarray
    m_values: np.ndarray
    abs_f: np.ndarray
    params: dict = field(default_factory=dict, compare=False)


def nm_series(series) -> NmSeries:
    """M(t) = 2 sum_{s<=t} max(0, |f(s)| - |f(s-1)|).

    Accepts an :class:`EchoSeries` or any sequence of f values.
    """
    mag = _abs_f(series)
    if isinstance(series, EchoSeries):
        times, params = series.times, dict(series.params)
    else:
        times, params = np.arange(mag.size), {}
    return NmSeries(np.asarray(times), 2.0 * positive_variation(mag), mag, params)


def _sample_ball(rng: np.random.Generator, count: int) -> np.ndarray:
    points = np.empty((0, 3))
    while points.shape[0] < count:
        cand = rng.uniform(-1.0, 1.0, size=(2 * count, 3))
        points = np.vstack([points, cand[np.sum(cand**2, axis=1) <= 1.0]])
    return points[:count]


@dataclass
class OptimalityReport:
    bound: np.ndarray
    max_sampled: float
    worst_excess: float
    optimal_pair_error: float
    violations: int
    samples: int

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.optimal_pair_error <= 1e-9


def verify_optimal_pair(pair: MapPair, horizon: int, samples: int, seed: int = 0) -> OptimalityReport:
    """Check that no qubit state pair beats rho_+- in accumulated trace-distance growth.

    Each sampled pair is propagated through the dense joint-evolution
    channels; its cumulative positive variation of D must stay below that
    of |f(t)| (computed independently with the FFT route) at every t.
    """
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    channels = channel_oracle_series(pair, horizon)
    echo = afa_series(pair, horizon)
    bound = positive_variation(echo)

    plus, minus = optimal_pair()
    d_opt = np.array([trace_distance(ch.apply(plus), ch.apply(minus)) for ch in channels])
    opt_err = float(np.max(np.abs(d_opt - echo.abs)))

    rng = np.random.default_rng(seed)
    points = _sample_ball(rng, 2 * samples)
    worst = -np.inf
    max_sampled = 0.0
    violations = 0
    for i in range(samples):
        r1 = QubitState.from_bloch(*points[2 * i])
        r2 = QubitState.from_bloch(*points[2 * i + 1])
        dist = [trace_distance(ch.apply(r1), ch.apply(r2)) for ch in channels]
        variation = positive_variation(dist)
        excess = float(np.max(variation - bound))
        worst = max(worst, excess)
        max_sampled = max(max_sampled, float(variation[-1]))
        if excess > 1e-8:
            violations += 1
    return OptimalityReport(bound, max_sampled, worst, opt_err, violations, samples)
