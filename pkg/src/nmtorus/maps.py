"""Perturbed cat map and kicked Harper map on the quantized torus.

Couplings are given either raw (delta) or in units of the effective Planck
constant, hbar = 1 / (2 pi N), so that delta / hbar is N-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from nmtorus.errors import ValidationError
from nmtorus.torus import Basis, KickedMap, KickPhase


def hbar(n: int) -> float:
    """Effective Planck constant of an N-dimensional torus (2 pi hbar = 1/N)."""
    return 1.0 / (2.0 * math.pi * n)


def coupling_from_hbar_units(delta_over_hbar: float, n: int) -> float:
    return delta_over_hbar * hbar(n)


@dataclass(frozen=True)
class PcmParams:
    a: float
    K: float
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValidationError(f"N must be >= 2, got {self.N}")
        if not self.a > 0:
            raise ValidationError(f"a must be positive, got {self.a}")


@dataclass(frozen=True)
class HarperParams:
    k: float
    k_prime: float
    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ValidationError(f"N must be >= 2, got {self.N}")


@dataclass(frozen=True)
class MapPair:
    """Unperturbed and perturbed environment maps, U1 = U0 P(coupling)."""

    u0: KickedMap
    u1: KickedMap
    coupling: float
    label: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.u0.dim != self.u1.dim:
            raise ValidationError(f"u0 has dim {self.u0.dim}, u1 has dim {self.u1.dim}")

    @property
    def dim(self) -> int:
        return self.u0.dim

    @property
    def identical(self) -> bool:
        """True when both maps have bit-identical kick tables, so U1^-t U0^t = I."""
        s0, s1 = self.u0.stages, self.u1.stages
        return len(s0) == len(s1) and all(
            b0 is b1 and np.array_equal(m0, m1) for (b0, m0), (b1, m1) in zip(s0, s1)
        )


def pcm_map(params: PcmParams) -> KickedMap:
    """exp(-i pi N a p^2) exp(i pi N a q^2) exp(i pi N K (2 sin 2 pi q - sin 4 pi q))."""
    n, a, kick = params.N, params.a, params.K
    kicks = (
        KickPhase(Basis.MOMENTUM, lambda p: -math.pi * n * a * p**2, "free"),
        KickPhase(Basis.POSITION, lambda q: math.pi * n * a * q**2, "shear"),
        KickPhase(
            Basis.POSITION,
            lambda q: math.pi * n * kick * (2 * np.sin(2 * math.pi * q) - np.sin(4 * math.pi * q)),
            "potential",
        ),
    )
    return KickedMap(kicks, n, f"pcm(a={a:g}, K={kick:g}, N={n})")


def harper_map(params: HarperParams) -> KickedMap:
    """exp(i N k cos 2 pi q) exp(i N k' cos 2 pi p)."""
    n, k, kp = params.N, params.k, params.k_prime
    kicks = (
        KickPhase(Basis.POSITION, lambda q: n * k * np.cos(2 * math.pi * q), "q-kick"),
        KickPhase(Basis.MOMENTUM, lambda p: n * kp * np.cos(2 * math.pi * p), "p-kick"),
    )
    return KickedMap(kicks, n, f"harper(k={k:g}, k'={kp:g}, N={n})")


def pcm_pair(params: PcmParams, delta_K: float) -> MapPair:
    perturbed = PcmParams(params.a, params.K + delta_K, params.N)
    return MapPair(
        pcm_map(params),
        pcm_map(perturbed),
        delta_K,
        f"pcm a={params.a:g} K={params.K:g} dK={delta_K:.6g} N={params.N}",
        {"family": "pcm", "N": params.N, "a": params.a, "K": params.K, "delta": delta_K},
    )


def harper_pair(params: HarperParams, delta_k: float) -> MapPair:
    """Only the position kick is perturbed: k -> k + delta_k, k' unchanged."""
    perturbed = HarperParams(params.k + delta_k, params.k_prime, params.N)
    return MapPair(
        harper_map(params),
        harper_map(perturbed),
        delta_k,
        f"harper k={params.k:g} k'={params.k_prime:g} dk={delta_k:.6g} N={params.N}",
        {"family": "harper", "N": params.N, "k": params.k, "k_prime": params.k_prime, "delta": delta_k},
    )


def pcm_lyapunov(a: float) -> float:
    """Lyapunov exponent of the linear part, ln of the larger eigenvalue of a trace 2+a^2 matrix."""
    if not a > 0:
        raise ValidationError(f"a must be positive, got {a}")
    return math.log((2 + a * a + math.sqrt(a * a * (4 + a * a))) / 2)


def ehrenfest_time(n: int, lyapunov: float) -> float:
    if not lyapunov > 0:
        raise ValidationError(f"Ehrenfest time undefined for non-positive Lyapunov exponent {lyapunov}")
    return math.log(n) / lyapunov
