"""Non-absorbing parity-check detector, ideal and faulty.

The detector reports whether a monitored spatial mode holds an odd or an even
number of photons, without absorbing them. With two photons in total, odd
parity in either spatial mode means one photon per mode, so the ideal
projectors coincide with the Bell (dual-rail) and NOON subspace projectors.

A faulty detector is modeled as an ideal QND projection followed by a
classical misreport: a true odd result is reported even with probability
``eps``, a true even result is reported odd with probability ``eps_prime``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .fock import (
    BASIS,
    DIM,
    ModeIndex,
    Polarization,
    Spatial,
    _two_photon_basis,
    lift_unitary_modes,
)

ZERO_PROBABILITY = 1e-14


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class DetectorSpec:
    monitored: str = "L"
    eps: float = 0.0
    eps_prime: float = 0.0

    def __post_init__(self):
        Spatial(self.monitored)
        for name in ("eps", "eps_prime"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    @property
    def ideal(self) -> bool:
        return self.eps == 0 and self.eps_prime == 0


@dataclass(frozen=True)
class MeasurementRecord:
    reported: Parity
    probability: float
    post_state: np.ndarray | None


def _diag_projector(odd_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    odd = np.diag(odd_mask.astype(complex))
    odd.setflags(write=False)
    even = np.eye(len(odd_mask), dtype=complex) - odd
    even.setflags(write=False)
    return odd, even


@lru_cache(maxsize=None)
def parity_projectors(monitored: str = "L") -> tuple[np.ndarray, np.ndarray]:
    """(odd, even) photon-number parity projectors for one spatial mode."""
    s = Spatial(monitored)
    modes = [ModeIndex.of(s, p) for p in Polarization]
    return _diag_projector(np.array([sum(o[m] for m in modes) % 2 for o in BASIS]))


@lru_cache(maxsize=None)
def polarized_parity_projectors(spatial: str, polarization: str) -> tuple[np.ndarray, np.ndarray]:
    """(odd, even) parity projectors for the single mode (spatial, polarization)."""
    m = ModeIndex.of(spatial, polarization)
    return _diag_projector(np.array([o[m] % 2 for o in BASIS]))


def _records(odd_part: np.ndarray, even_part: np.ndarray, eps: float, eps_prime: float):
    reported = {
        Parity.ODD: (1 - eps) * odd_part + eps_prime * even_part,
        Parity.EVEN: eps * odd_part + (1 - eps_prime) * even_part,
    }
    out = []
    for outcome, branch in reported.items():
        p = float(np.trace(branch).real)
        if p <= ZERO_PROBABILITY:
            out.append(MeasurementRecord(outcome, 0.0, None))
        else:
            out.append(MeasurementRecord(outcome, p, branch / p))
    return tuple(out)


def measure_parity(rho: np.ndarray, spec: DetectorSpec = DetectorSpec()) -> tuple[MeasurementRecord, MeasurementRecord]:
    """Parity check of ``spec.monitored``; returns the (odd, even) reported records.

    The odd-reported branch has probability
    ``(1 - eps) Tr(P_odd rho) + eps_prime Tr(P_even rho)`` and post state
    ``[(1 - eps) P_odd rho P_odd + eps_prime P_even rho P_even] / p``; the
    even branch is complementary. A branch of zero probability carries no
    post state.
    """
    odd, even = parity_projectors(spec.monitored)
    return _records(odd @ rho @ odd, even @ rho @ even, spec.eps, spec.eps_prime)


def measure_polarized_parity(rho: np.ndarray, spatial: str, polarization: str) -> tuple[MeasurementRecord, MeasurementRecord]:
    """Ideal parity check of the single mode (spatial, polarization)."""
    odd, even = polarized_parity_projectors(spatial, polarization)
    return _records(odd @ rho @ odd, even @ rho @ even, 0.0, 0.0)


# -- PBS / D / PBS composite -----------------------------------------------------

AUX = 4  # vacuum path the unmonitored polarization is routed into


@lru_cache(maxsize=None)
def _composite_operators(spatial: str, polarization: str):
    basis5 = _two_photon_basis(5)
    embed = np.zeros((len(basis5), DIM), dtype=complex)
    for j, occ in enumerate(BASIS):
        embed[basis5.index(occ + (0,)), j] = 1.0
    # PBS on the monitored spatial mode: the chosen polarization stays on the
    # path watched by D, the other one leaves for the auxiliary path.
    other = Polarization.DOWN if Polarization(polarization) is Polarization.UP else Polarization.UP
    swap = np.eye(5)
    m = ModeIndex.of(spatial, other)
    swap[[m, AUX]] = swap[[AUX, m]]
    pbs = lift_unitary_modes(swap)
    path_modes = [ModeIndex.of(spatial, p) for p in Polarization]
    odd = np.diag([sum(o[k] for k in path_modes) % 2 for o in basis5]).astype(complex)
    even = np.eye(len(basis5)) - odd
    # Recombine in a second PBS (the inverse), then return to the four-mode space.
    return tuple(embed.conj().T @ pbs.conj().T @ P @ pbs @ embed for P in (odd, even))


def composite_polarized_parity(rho: np.ndarray, spatial: str, polarization: str) -> tuple[MeasurementRecord, MeasurementRecord]:
    """Polarization-sensitive parity check built from PBS, the polarization-blind D and a second PBS.

    The first PBS sends the unmonitored polarization of ``spatial`` into an
    auxiliary path, so D sees only the monitored mode; the second PBS recombines.
    Agrees with :func:`measure_polarized_parity`.
    """
    odd, even = _composite_operators(Spatial(spatial).value, Polarization(polarization).value)
    return _records(odd @ rho @ odd.conj().T, even @ rho @ even.conj().T, 0.0, 0.0)
