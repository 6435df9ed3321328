"""Iterative singlet distillation: exact density-matrix and trajectory engines.

One round of the depolarizing variant is

    depolarize both photons -> BS -> parity check
        odd:  collect the pair (the singlet, for an ideal detector)
        even: BS, then start the next round

The amplitude-damping variant replaces depolarization by damping both modes
followed by a 90 degree polarization rotator on L.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channels import (
    amplitude_damp,
    amplitude_damping_channel,
    depolarize,
    haar_unitary_2,
    lift_local_channel,
    random_dual_rail_state,
)
from .detector import DetectorSpec, Parity, measure_parity, parity_projectors
from .fock import (
    DUAL_RAIL,
    HERMITIAN_TOL,
    SupportError,
    array_to_json,
    basis_ket,
    dual_rail_block,
    fidelity,
    projector,
)
from .optics import BS, lifted, pr, state

SINGLET = "1-LR"
SIGMA_YY = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)


class Variant(str, enum.Enum):
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "amplitude-damping"


class Mode(str, enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class ProtocolConfig:
    variant: Variant = Variant.DEPOLARIZING
    gamma: float = 1.0
    max_iterations: int = 1
    mode: Mode = Mode.EXACT
    trajectories: int = 10_000
    seed: int = 0
    detector: DetectorSpec = DetectorSpec()
    # None means a random dual-rail state drawn from ``seed``.
    initial_state: np.ndarray | None = field(default=None, compare=False, repr=False)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.mode is Mode.MONTE_CARLO and self.trajectories < 1:
            raise ValueError("trajectories must be at least 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")

    def resolved_initial_state(self) -> np.ndarray:
        if self.initial_state is not None:
            return np.asarray(self.initial_state, dtype=complex)
        return random_dual_rail_state(np.random.default_rng(self.seed))

    def to_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "gamma": self.gamma,
            "max_iterations": self.max_iterations,
            "mode": self.mode.value,
            "trajectories": self.trajectories if self.mode is Mode.MONTE_CARLO else None,
            "seed": self.seed,
            "detector": {
                "monitored": self.detector.monitored,
                "eps": self.detector.eps,
                "eps_prime": self.detector.eps_prime,
            },
            "initial_state": "random" if self.initial_state is None else "given",
        }


@dataclass(frozen=True)
class RoundRecord:
    iteration: int
    # Probability of an odd report in this round, given the round was reached.
    success_prob_this_round: float
    cumulative_success: float


@dataclass
class ProtocolResult:
    config: ProtocolConfig
    per_iteration: list[RoundRecord]
    final_state: np.ndarray | None
    singlet_fidelity: float
    concurrence: float
    notes: list[str] = field(default_factory=list)

    @property
    def cumulative(self) -> list[float]:
        return [r.cumulative_success for r in self.per_iteration]

    def to_dict(self, include_state: bool = True) -> dict:
        out = {
            "config": self.config.to_dict(),
            "per_iteration": [
                {
                    "iteration": r.iteration,
                    "success_prob_this_round": r.success_prob_this_round,
                    "cumulative_success": r.cumulative_success,
                }
                for r in self.per_iteration
            ],
            "singlet_fidelity": _json_float(self.singlet_fidelity),
            "concurrence": _json_float(self.concurrence),
            "notes": list(self.notes),
        }
        if include_state:
            out["final_state"] = None if self.final_state is None else array_to_json(self.final_state)
        return out


def _json_float(x: float) -> float | None:
    return None if math.isnan(x) else x


# -- concurrence -------------------------------------------------------------

def wootters_concurrence(block: np.ndarray) -> float:
    """Concurrence of a (possibly subnormalized) two-qubit operator.

    The Wootters lambdas are the square roots of the eigenvalues of
    ``B (sy x sy) B* (sy x sy)``; they are computed as the singular values of
    ``X^T (sy x sy) X`` with ``B = X X^dag``, which avoids square roots of
    round-off eigenvalues.
    """
    block = np.asarray(block, dtype=complex)
    block = (block + block.conj().T) / 2
    w, V = np.linalg.eigh(block)
    w = np.where(w > 1e-14 * max(w.max(), 0.0), w, 0.0)
    X = V * np.sqrt(w)
    lam = np.linalg.svd(X.T @ SIGMA_YY @ X, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def polarization_concurrence(rho: np.ndarray) -> float:
    """Concurrence of the polarization qubits carried by the dual-rail block of ``rho``.

    The NOON sector only lowers the block weight; it contributes no
    polarization entanglement.
    """
    block, _ = dual_rail_block(rho)
    return wootters_concurrence(block)


# -- named states of the depolarizing pipeline -----------------------------------

def build_protocol_states() -> dict[str, np.ndarray]:
    """rho_dep, rho_BS, rho_NO and xi_LR, produced by running the actual pipeline."""
    rho_dep = depolarize(projector(basis_ket((1, 0, 0, 1))))
    U = lifted(BS)
    rho_bs = U @ rho_dep @ U.conj().T
    _, even = measure_parity(rho_bs)
    rho_no = even.post_state
    xi_lr = U @ rho_no @ U.conj().T
    return {"rho_dep": rho_dep, "rho_BS": rho_bs, "rho_NO": rho_no, "xi_LR": xi_lr}


# -- exact engine ---------------------------------------------------------------

def _reset(rho: np.ndarray, config: ProtocolConfig) -> np.ndarray:
    if config.variant is Variant.DEPOLARIZING:
        return depolarize(rho)
    rho = amplitude_damp(rho, config.gamma)
    U = lifted(pr(np.pi / 2, "L"))
    return U @ rho @ U.conj().T


def _notes(config: ProtocolConfig) -> list[str]:
    notes = []
    if not config.detector.ideal and config.max_iterations > 1:
        notes.append(
            "model-defined: faulty-detector rounds beyond the first assume constant eps, eps_prime "
            "and the usual BS + reset after every even report"
        )
    if config.variant is Variant.AMPLITUDE_DAMPING and config.gamma != 1.0:
        notes.append("model extension: amplitude damping with gamma < 1")
    return notes


def run_exact(config: ProtocolConfig) -> ProtocolResult:
    """Density-matrix evolution of the protocol for ``config.max_iterations`` rounds.

    ``final_state`` is the collected state conditioned on success (an odd
    report in some round); it is None if success is impossible.
    """
    U = lifted(BS)
    rho = config.resolved_initial_state()
    alive = 1.0
    cumulative = 0.0
    collected = np.zeros_like(rho)
    rounds = []
    for j in range(1, config.max_iterations + 1):
        rho = _reset(rho, config)
        rho = U @ rho @ U.conj().T
        odd, even = measure_parity(rho, config.detector)
        if odd.post_state is not None:
            collected += alive * odd.probability * odd.post_state
        cumulative += alive * odd.probability
        rounds.append(RoundRecord(j, odd.probability, cumulative))
        if even.post_state is None:
            break
        alive *= even.probability
        rho = U @ even.post_state @ U.conj().T
    for j in range(len(rounds) + 1, config.max_iterations + 1):
        rounds.append(RoundRecord(j, 0.0, cumulative))
    return _result(config, rounds, collected / cumulative if cumulative > 0 else None)


def _result(config: ProtocolConfig, rounds, final_state) -> ProtocolResult:
    if final_state is None:
        fid, conc = math.nan, math.nan
    else:
        fid = fidelity(final_state, state(SINGLET))
        conc = polarization_concurrence(final_state)
    return ProtocolResult(config, rounds, final_state, fid, conc, _notes(config))


# -- trajectory engine ---------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryLog:
    index: int
    rounds: int
    succeeded: bool
    reports: tuple[str, ...]


@lru_cache(maxsize=None)
def _ad_kraus(gamma: float) -> tuple[tuple[np.ndarray, ...], ...]:
    ch = amplitude_damping_channel(gamma)
    return tuple(tuple(lift_local_channel(ch, t)) for t in ("L", "R"))


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trajectory ``index``; depends only on (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _pick(weights: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(weights)
    return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(weights) - 1)


def _haar_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return haar_unitary_2(rng), haar_unitary_2(rng)


class _TrajectoryKernel:
    """Per-configuration constants shared by every trajectory of a run."""

    def __init__(self, config: ProtocolConfig, rho0: np.ndarray):
        self.config = config
        w, V = np.linalg.eigh(rho0)
        self.ensemble_weights = np.clip(w, 0, None)
        self.ensemble = V
        self.odd_mask = np.diag(parity_projectors(config.detector.monitored)[0]).real.astype(bool)
        self.bs = lifted(BS)
        self.pr_l = lifted(pr(np.pi / 2, "L"))
        self.to_qubits = DUAL_RAIL.conj().T
        self.ad_kraus = _ad_kraus(config.gamma) if config.variant is Variant.AMPLITUDE_DAMPING else ()

    def _reset(self, v: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if self.config.variant is Variant.DEPOLARIZING:
            qubits = self.to_qubits @ v
            if abs(1.0 - np.vdot(qubits, qubits).real) > HERMITIAN_TOL:
                raise SupportError("trajectory left the dual-rail subspace before depolarization")
            u_l, u_r = _haar_pair(rng)
            # (u_l x u_r) acting on the L-first two-qubit amplitudes
            return DUAL_RAIL @ (u_l @ qubits.reshape(2, 2) @ u_r.T).reshape(4)
        for kraus in self.ad_kraus:
            branches = [K @ v for K in kraus]
            weights = np.array([np.vdot(b, b).real for b in branches])
            pick = _pick(weights, rng)
            v = branches[pick] / np.sqrt(weights[pick])
        return self.pr_l @ v

    def run(self, index: int):
        config = self.config
        eps, eps_prime = config.detector.eps, config.detector.eps_prime
        rng = trajectory_rng(config.seed, index)
        v = self.ensemble[:, _pick(self.ensemble_weights, rng)]
        reports = []
        for _ in range(config.max_iterations):
            v = self.bs @ self._reset(v, rng)
            p_odd = float(np.sum(np.abs(v[self.odd_mask]) ** 2))
            true_odd = rng.random() < p_odd
            v = np.where(self.odd_mask == true_odd, v, 0)
            v = v / np.sqrt(np.vdot(v, v).real)
            flip = rng.random() < (eps if true_odd else eps_prime)
            reported_odd = true_odd != flip
            reports.append(Parity.ODD.value if reported_odd else Parity.EVEN.value)
            if reported_odd:
                return TrajectoryLog(index, len(reports), True, tuple(reports)), v
            v = self.bs @ v
        return TrajectoryLog(index, len(reports), False, tuple(reports)), None


def _run_chunk(args):
    indices, config, rho0 = args
    kernel = _TrajectoryKernel(config, rho0)
    return [kernel.run(i) for i in indices]


def run_trajectories(config: ProtocolConfig) -> tuple[ProtocolResult, list[TrajectoryLog]]:
    """Sample ``config.trajectories`` independent runs of the protocol.

    Detector outcomes (including misreports) and depolarizing rotations are
    drawn per trajectory from :func:`trajectory_rng`, so the output does not
    depend on ``config.workers``.
    """
    rho0 = config.resolved_initial_state()
    n = config.trajectories
    if config.workers == 1:
        outcomes = _run_chunk((range(n), config, rho0))
    else:
        chunks = [range(k, n, config.workers) for k in range(config.workers)]
        with ProcessPoolExecutor(config.workers) as pool:
            parts = list(pool.map(_run_chunk, [(c, config, rho0) for c in chunks]))
        outcomes = sorted((o for part in parts for o in part), key=lambda o: o[0].index)

    logs = [log for log, _ in outcomes]
    rounds = []
    successes = 0
    for j in range(1, config.max_iterations + 1):
        reached = sum(1 for log in logs if log.rounds >= j)
        won = sum(1 for log in logs if log.succeeded and log.rounds == j)
        successes += won
        rounds.append(RoundRecord(j, won / reached if reached else 0.0, successes / n))

    final_state = None
    if successes:
        final_state = np.zeros((len(rho0), len(rho0)), dtype=complex)
        for _, v in outcomes:
            if v is not None:
                final_state += np.outer(v, v.conj())
        final_state /= successes
    return _result(config, rounds, final_state), logs


def run(config: ProtocolConfig) -> ProtocolResult:
    if config.mode is Mode.EXACT:
        return run_exact(config)
    return run_trajectories(config)[0]


# -- faulty-detector sweep -------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    eps: float
    eps_prime: float
    p_lr: float
    concurrence: float


def sweep_errors(eps_values, eps_prime_values, monitored: str = "L") -> list[SweepRow]:
    """Odd-report probability and collected-state concurrence on rho_BS over a grid.

    The (eps=1, eps_prime=0) point never reports odd; its concurrence is NaN.
    """
    rho_bs = build_protocol_states()["rho_BS"]
    rows = []
    for eps in eps_values:
        for eps_prime in eps_prime_values:
            odd, _ = measure_parity(rho_bs, DetectorSpec(monitored, float(eps), float(eps_prime)))
            conc = math.nan if odd.post_state is None else polarization_concurrence(odd.post_state)
            rows.append(SweepRow(float(eps), float(eps_prime), odd.probability, conc))
    return rows
