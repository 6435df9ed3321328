"""Local polarization noise on the dual-rail subspace.

Single-qubit channels act on the polarization of the photon sitting in one
spatial mode. They are only defined on states with exactly one photon per
spatial mode; applying them to a state with NOON-sector weight raises
:class:`~parity_distill.fock.SupportError`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import (
    HERMITIAN_TOL,
    SupportError,
    apply_kraus,
    embed_dual_rail,
    lift_unitary,
)
from .optics import projector_LR

# Qubit basis per mode: index 0 is up, index 1 is down (ground).
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class QubitChannel:
    kraus: tuple[np.ndarray, ...]
    name: str = "channel"

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if any(k.shape != (2, 2) for k in ops):
            raise ValueError("qubit Kraus operators must be 2x2")
        residual = np.max(np.abs(sum(k.conj().T @ k for k in ops) - I2))
        if residual > HERMITIAN_TOL:
            raise ValueError(f"Kraus operators not trace preserving (residual {residual:.3g})")
        object.__setattr__(self, "kraus", ops)

    def choi(self) -> np.ndarray:
        """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)``."""
        out = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1
                out += np.kron(e, sum(k @ e @ k.conj().T for k in self.kraus))
        return out


def identity_channel() -> QubitChannel:
    return QubitChannel((I2,), "identity")


def depolarizing_channel(p: float = 1.0) -> QubitChannel:
    """``rho -> (1 - p) rho + p I/2``; p=1 is full depolarization."""
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing strength must be in [0, 1], got {p}")
    return QubitChannel(
        (np.sqrt(1 - 3 * p / 4) * I2, *(np.sqrt(p / 4) * s for s in (X, Y, Z))), f"depolarizing({p:g})"
    )


def amplitude_damping_channel(gamma: float) -> QubitChannel:
    if not 0 <= gamma <= 1:
        raise ValueError(f"damping probability must be in [0, 1], got {gamma}")
    k0 = np.diag([np.sqrt(1 - gamma), 1.0]).astype(complex)
    k1 = np.array([[0, 0], [np.sqrt(gamma), 0]], dtype=complex)  # up -> down
    return QubitChannel((k0, k1), f"amplitude-damping({gamma:g})")


def _on_target(op: np.ndarray, target: str) -> np.ndarray:
    if target == "L":
        return np.kron(op, I2)
    if target == "R":
        return np.kron(I2, op)
    raise ValueError(f"target must be L or R, not {target!r}")


def lift_local_channel(channel: QubitChannel, target: str) -> list[np.ndarray]:
    """Kraus operators on the Fock space acting as ``channel`` on mode ``target``.

    They act on the dual-rail subspace only and vanish outside it.
    """
    return [embed_dual_rail(_on_target(k, target)) for k in channel.kraus]


def apply_local_channel(rho: np.ndarray, channel: QubitChannel, target: str) -> np.ndarray:
    return apply_kraus(rho, lift_local_channel(channel, target), support=projector_LR())


def _require_dual_rail(rho: np.ndarray) -> None:
    outside = np.trace(rho).real - np.trace(projector_LR() @ rho).real
    if abs(outside) > HERMITIAN_TOL:
        raise SupportError(f"state has NOON-sector weight {outside:.3g}; local channels need one photon per mode")


def depolarize(rho: np.ndarray) -> np.ndarray:
    """Full local depolarization of both photons: returns exactly ``P_LR / 4``."""
    _require_dual_rail(rho)
    return projector_LR() / 4


def amplitude_damp(rho: np.ndarray, gamma: float, target: str | Sequence[str] = ("L", "R")) -> np.ndarray:
    """Amplitude damping of strength ``gamma`` on one or both spatial modes."""
    channel = amplitude_damping_channel(gamma)
    for t in [target] if isinstance(target, str) else target:
        rho = apply_local_channel(rho, channel, t)
    return rho


# -- Monte Carlo depolarization --------------------------------------------------

def haar_unitary_2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary: uniform SU(2) via a unit quaternion, times a uniform phase."""
    a, b, c, d = rng.standard_normal(4)
    n = np.sqrt(a * a + b * b + c * c + d * d)
    a, b, c, d = a / n, b / n, c / n, d / n
    phase = np.exp(2j * np.pi * rng.random())
    return phase * np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def random_local_rotation(rng: np.random.Generator) -> np.ndarray:
    """Independent Haar polarization unitaries on L and R, as a 4x4 single-particle unitary."""
    u = np.zeros((4, 4), dtype=complex)
    u[:2, :2] = haar_unitary_2(rng)
    u[2:, 2:] = haar_unitary_2(rng)
    return u


def depolarize_mc(rho: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One randomized-rotator sample; its average over ``rng`` is :func:`depolarize`."""
    _require_dual_rail(rho)
    U = lift_unitary(random_local_rotation(rng), check=False)
    return U @ rho @ U.conj().T


def random_dual_rail_state(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    """Random density operator supported on the dual-rail subspace."""
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    block = g @ g.conj().T
    return embed_dual_rail(block / np.trace(block).real)


def random_local_noise(rho: np.ndarray, rng: np.random.Generator, steps: int = 3) -> np.ndarray:
    """Corrupt ``rho`` with a random sequence of local channels and rotations."""
    for _ in range(steps):
        target = "L" if rng.random() < 0.5 else "R"
        choice = rng.integers(3)
        if choice == 0:
            rho = apply_local_channel(rho, amplitude_damping_channel(rng.random()), target)
        elif choice == 1:
            rho = apply_local_channel(rho, depolarizing_channel(rng.random()), target)
        else:
            U = lift_unitary(random_local_rotation(rng), check=False)
            rho = U @ rho @ U.conj().T
    return rho

