"""Hilbert space of the quantized torus and split-operator map application.

Position eigenvalues are q_n = n/N and momentum eigenvalues p_m = m/N,
n, m = 0..N-1, with periodic boundary conditions (zero Bloch phases).
The change of basis is <p_m|q_n> = exp(-2 pi i m n / N) / sqrt(N), which
is exactly ``scipy.fft.fft(..., norm="ortho")``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.fft as sfft

from nmtorus.errors import DimensionMismatchError, SizeGuardError, ValidationError

DENSE_GUARD = 4096


class Basis(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


def lattice(n: int) -> np.ndarray:
    """Lattice coordinates 0, 1/N, ..., (N-1)/N."""
    return np.arange(n) / n


@dataclass(frozen=True)
class TorusState:
    """Amplitudes of a torus state in the position representation."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.ndim != 1 or amp.size < 1:
            raise ValidationError("amplitudes must be a non-empty 1-d vector")
        if not np.all(np.isfinite(amp)):
            raise ValidationError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def position_basis(cls, dim: int, n: int) -> "TorusState":
        amp = np.zeros(dim, dtype=np.complex128)
        amp[n % dim] = 1.0
        return cls(amp)

    @classmethod
    def momentum_basis(cls, dim: int, m: int) -> "TorusState":
        amp = np.zeros(dim, dtype=np.complex128)
        amp[m % dim] = 1.0
        return to_position(cls(amp))

    @classmethod
    def uniform(cls, dim: int) -> "TorusState":
        return cls(np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128))

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator | None = None) -> "TorusState":
        """Normalized state with i.i.d. complex Gaussian amplitudes."""
        rng = np.random.default_rng() if rng is None else rng
        amp = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(amp / np.linalg.norm(amp))


def to_momentum(state: TorusState) -> TorusState:
    return TorusState(sfft.fft(state.amplitudes, norm="ortho"))


def to_position(state: TorusState) -> TorusState:
    return TorusState(sfft.ifft(state.amplitudes, norm="ortho"))


@dataclass(frozen=True)
class KickPhase:
    """A unitary factor exp(i theta(x)), diagonal in ``basis``.

    ``phase_fn`` receives the lattice coordinates as an array and returns
    the phase angles in radians.
    """

    basis: Basis
    phase_fn: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def multipliers(self, dim: int) -> np.ndarray:
        theta = np.asarray(self.phase_fn(lattice(dim)), dtype=np.float64)
        if theta.shape != (dim,):
            raise ValidationError(f"phase function of kick {self.label!r} returned shape {theta.shape}")
        return np.exp(1j * theta)


@dataclass(frozen=True)
class KickedMap:
    """Product of kicks, listed in printed operator order.

    The last kick in ``kicks`` acts first. Multiplier tables are evaluated
    once at construction; adjacent kicks in the same basis are fused so a
    momentum block costs one forward and one inverse transform.
    """

    kicks: tuple[KickPhase, ...]
    dim: int
    label: str = ""
    _stages: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        object.__setattr__(self, "kicks", tuple(self.kicks))
        stages: list[tuple[Basis, np.ndarray]] = []
        for kick in reversed(self.kicks):
            mult = kick.multipliers(self.dim)
            if stages and stages[-1][0] is kick.basis:
                stages[-1] = (kick.basis, stages[-1][1] * mult)
            else:
                stages.append((kick.basis, mult))
        for _, mult in stages:
            mult.setflags(write=False)
        object.__setattr__(self, "_stages", tuple(stages))

    @property
    def stages(self) -> tuple:
        """Fused (basis, multiplier) stages in application order."""
        return self._stages

    def evolve(self, block: np.ndarray, workers: int | None = None) -> np.ndarray:
        """Apply the map to every state stored along the last axis of ``block``."""
        out = np.asarray(block, dtype=np.complex128)
        for basis, mult in self._stages:
            if basis is Basis.POSITION:
                out = out * mult
            else:
                out = sfft.fft(out, axis=-1, norm="ortho", workers=workers)
                out *= mult
                out = sfft.ifft(out, axis=-1, norm="ortho", overwrite_x=True, workers=workers)
        return out


def apply_map(kmap: KickedMap, state: TorusState) -> TorusState:
    if kmap.dim != state.dim:
        raise DimensionMismatchError(f"map has dim {kmap.dim} but state has dim {state.dim}")
    return TorusState(kmap.evolve(state.amplitudes))


def dft_matrix(dim: int) -> np.ndarray:
    """Explicit matrix of <p_m|q_n>."""
    idx = np.arange(dim)
    return np.exp(-2j * np.pi * (np.outer(idx, idx) % dim) / dim) / np.sqrt(dim)


def kick_matrix(kick: KickPhase, dim: int) -> np.ndarray:
    diag = np.diag(kick.multipliers(dim))
    if kick.basis is Basis.POSITION:
        return diag
    f = dft_matrix(dim)
    return f.conj().T @ diag @ f


def build_dense(kmap: KickedMap) -> np.ndarray:
    """Dense unitary of ``kmap`` from explicit DFT and diagonal matrices.

    Built without FFTs, so it serves as an independent check of
    :meth:`KickedMap.evolve`.
    """
    if kmap.dim > DENSE_GUARD:
        raise SizeGuardError(f"dense construction limited to N <= {DENSE_GUARD}, got {kmap.dim}")
    u = np.eye(kmap.dim, dtype=np.complex128)
    for kick in kmap.kicks:
        u = u @ kick_matrix(kick, kmap.dim)
    return u

