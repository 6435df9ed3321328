"""Two-photon Fock space over four single-particle modes.

Modes are ordered L-up, L-down, R-up, R-down. The ten occupation states with
two photons are indexed in descending lexicographic order of their occupation
vectors, and every state and operator in the package uses that ordering.

States are plain numpy arrays: kets are length-10 complex vectors, density
operators are 10x10 complex matrices. Doubly occupied modes use the standard
unit-norm Fock state ``(a^dag)^2 |vac> / sqrt(2)``.
"""
from __future__ import annotations

import enum
import itertools
from math import factorial, sqrt
from typing import Sequence

import numpy as np

N_MODES = 4
N_PHOTONS = 2

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-8


class StateError(ValueError):
    """Raised when an array is not a valid state or operator."""


class SupportError(ValueError):
    """Raised when a state has weight outside the subspace an operation needs."""


class Spatial(str, enum.Enum):
    L = "L"
    R = "R"


class Polarization(str, enum.Enum):
    UP = "up"
    DOWN = "down"


class ModeIndex(enum.IntEnum):
    L_UP = 0
    L_DOWN = 1
    R_UP = 2
    R_DOWN = 3

    @classmethod
    def of(cls, spatial: Spatial | str, polarization: Polarization | str) -> "ModeIndex":
        s = Spatial(spatial)
        p = Polarization(polarization)
        return cls(2 * (s is Spatial.R) + (p is Polarization.DOWN))

    def spatial(self) -> Spatial:
        return Spatial.L if self < 2 else Spatial.R

    def polarization(self) -> Polarization:
        return Polarization.UP if self % 2 == 0 else Polarization.DOWN

    @property
    def label(self) -> str:
        arrow = "↑" if self.polarization() is Polarization.UP else "↓"
        return f"{self.spatial().value}{arrow}"


def _two_photon_basis(n_modes: int) -> tuple[tuple[int, ...], ...]:
    occs = [o for o in itertools.product(range(N_PHOTONS + 1), repeat=n_modes) if sum(o) == N_PHOTONS]
    return tuple(sorted(occs, reverse=True))


BASIS: tuple[tuple[int, ...], ...] = _two_photon_basis(N_MODES)
DIM = len(BASIS)
_INDEX = {occ: i for i, occ in enumerate(BASIS)}


def enumerate_basis() -> list[tuple[int, ...]]:
    """Return the ten two-photon occupation vectors in canonical order."""
    return list(BASIS)


def basis_index(occ: Sequence[int]) -> int:
    try:
        return _INDEX[tuple(int(n) for n in occ)]
    except KeyError:
        raise ValueError(f"{tuple(occ)} is not a two-photon occupation of four modes") from None


def occupation_label(occ: Sequence[int]) -> str:
    """Human-readable ket label, e.g. ``|L↑,R↓>`` or ``|L↑,L↑>``."""
    photons = [ModeIndex(m).label for m in _occupied_modes(occ)]
    return "|" + ",".join(photons) + ">"


def basis_ket(occ: Sequence[int]) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[basis_index(occ)] = 1.0
    return v


def ket(amplitudes: dict[tuple[int, ...], complex], normalize: bool = True) -> np.ndarray:
    """Build a ket from a ``{occupation: amplitude}`` mapping."""
    v = np.zeros(DIM, dtype=complex)
    for occ, amp in amplitudes.items():
        v[basis_index(occ)] += amp
    if normalize:
        v /= np.linalg.norm(v)
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


# -- validation --------------------------------------------------------------

def check_pure(psi: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (DIM,):
        raise StateError(f"expected a length-{DIM} ket, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise StateError(f"ket norm {np.linalg.norm(psi):.3g} differs from 1")
    return psi


def check_density(rho: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (DIM, DIM):
        raise StateError(f"expected a {DIM}x{DIM} operator, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise StateError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise StateError(f"density operator has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise StateError("density operator has a negative eigenvalue")
    return rho


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise StateError(f"expected a square matrix, got shape {u.shape}")
    residual = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if residual > tol:
        raise StateError(f"matrix is not unitary (residual {residual:.3g})")
    return u


# -- second quantization -----------------------------------------------------

def _occupied_modes(occ: Sequence[int]) -> list[int]:
    return [m for m, n in enumerate(occ) for _ in range(n)]


def _lift_tables(basis: Sequence[tuple[int, ...]]):
    modes = np.array([_occupied_modes(o) for o in basis])
    norm = np.array([np.prod([factorial(n) for n in o]) for o in basis], dtype=float)
    return modes[:, 0], modes[:, 1], 1.0 / np.sqrt(np.outer(norm, norm))


_LIFT_TABLES = _lift_tables(BASIS)


def _lift_with(u: np.ndarray, tables) -> np.ndarray:
    # 2x2 permanents for every (output, input) occupation pair at once; works on stacks of u.
    m1, m2, scale = tables
    a1, a2 = m1[:, None], m2[:, None]
    b1, b2 = m1[None, :], m2[None, :]
    per = u[..., a1, b1] * u[..., a2, b2] + u[..., a1, b2] * u[..., a2, b1]
    return per * scale


def lift_unitary(u: np.ndarray, check: bool = True) -> np.ndarray:
    """Second-quantized image of a single-particle unitary on the two-photon space.

    The matrix element between occupations ``out`` and ``in`` is the permanent
    of the 2x2 submatrix of ``u`` (rows repeated per ``out``, columns per
    ``in``) divided by ``sqrt(prod(out!) * prod(in!))``.

    Parameters
    ----------
    u : ndarray
        4x4 single-particle unitary acting as ``a_b^dag -> sum_a u[a, b] a_a^dag``.
        A stack of shape (..., 4, 4) is lifted elementwise.
    check : bool
        Reject non-unitary input (residual above 1e-8).
    """
    u = np.asarray(u, dtype=complex)
    if u.shape[-2:] != (N_MODES, N_MODES):
        raise StateError(f"expected 4x4 single-particle unitary, got shape {u.shape}")
    if check:
        for mat in u.reshape(-1, N_MODES, N_MODES):
            check_unitary(mat)
    return _lift_with(u, _LIFT_TABLES)


def lift_unitary_modes(u: np.ndarray) -> np.ndarray:
    """Two-photon lift of an n-mode single-particle unitary (any n >= 2).

    Used for constructions that route light through auxiliary paths.
    """
    u = check_unitary(u)
    return _lift_with(u, _lift_tables(_two_photon_basis(u.shape[0])))


def apply_unitary(rho: np.ndarray, U: np.ndarray) -> np.ndarray:
    return U @ rho @ U.conj().T


def apply_kraus(rho: np.ndarray, kraus: Sequence[np.ndarray], support: np.ndarray | None = None,
                tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Apply ``sum_k K rho K^dag``.

    ``support`` is an orthogonal projector onto the subspace where the Kraus
    set is complete; the state must live inside it. Defaults to the full space.
    """
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    P = np.eye(DIM) if support is None else np.asarray(support)
    completeness = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(P @ completeness @ P - P)) > tol:
        raise StateError("Kraus operators are not complete on the declared support")
    outside = np.trace(rho).real - np.trace(P @ rho).real
    if abs(outside) > tol:
        raise SupportError(f"state has weight {outside:.3g} outside the channel support")
    return sum(k @ rho @ k.conj().T for k in kraus)


# -- dual-rail subspace --------------------------------------------------------

# One photon in each spatial mode, as two qubits (L first) in the order
# up-up, up-down, down-up, down-down.
DUAL_RAIL_OCCUPATIONS = ((1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1))
DUAL_RAIL = np.zeros((DIM, 4), dtype=complex)
for _q, _occ in enumerate(DUAL_RAIL_OCCUPATIONS):
    DUAL_RAIL[basis_index(_occ), _q] = 1.0
DUAL_RAIL.setflags(write=False)


def embed_dual_rail(op: np.ndarray) -> np.ndarray:
    """Embed a two-qubit operator (4x4) or ket (4,) into the Fock space, zero elsewhere."""
    op = np.asarray(op, dtype=complex)
    if op.ndim == 1:
        return DUAL_RAIL @ op
    return DUAL_RAIL @ op @ DUAL_RAIL.conj().T


def dual_rail_block(rho: np.ndarray) -> tuple[np.ndarray, float]:
    """Subnormalized two-qubit block of ``rho`` on the dual-rail subspace, and its trace."""
    block = DUAL_RAIL.conj().T @ np.asarray(rho) @ DUAL_RAIL
    return block, float(np.trace(block).real)


# -- amplitude matrix --------------------------------------------------------

def amplitude_matrix(psi: np.ndarray) -> np.ndarray:
    """Symmetric M with ``|psi> = sum_ab M[a, b] a_a^dag a_b^dag |vac>``.

    With this convention ``<psi|psi> = 2 * sum |M|^2`` and a passive element
    ``u`` acts as ``M -> u M u^T``.
    """
    psi = np.asarray(psi, dtype=complex)
    M = np.zeros((N_MODES, N_MODES), dtype=complex)
    for occ, amp in zip(BASIS, psi):
        a, b = _occupied_modes(occ)
        if a == b:
            M[a, a] = amp / sqrt(2.0)
        else:
            M[a, b] = M[b, a] = amp / 2.0
    return M


def matrix_rank(M: np.ndarray, tol: float = 1e-8) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    s = np.linalg.svd(np.asarray(M), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


# -- comparisons ----------------------------------------------------------

def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(psi.conj() @ rho @ psi))


def same_up_to_phase(psi: np.ndarray, phi: np.ndarray, tol: float = 1e-10) -> bool:
    return abs(abs(np.vdot(psi, phi)) - 1.0) <= tol


def trace_norm(a: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2))))


# -- JSON ---------------------------------------------------------------------

def complex_to_json(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def array_to_json(a: np.ndarray) -> list:
    """Nested lists with complex entries as ``[re, im]`` pairs, row-major."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a)
    return [array_to_json(row) for row in a]


def array_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
