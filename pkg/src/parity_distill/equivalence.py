"""Passive-optical (PO) equivalence of the canonical maximally entangled states.

Two certificates are provided. Reachability is shown constructively by a
breadth-first search over a discrete set of PO generators. Non-reachability is
proved by the rank of the two-photon amplitude matrix, which no single-particle
unitary can change (``M -> u M u^T``): the set S1 has rank 4, the set S2 rank 2.
Crossing between the sets needs the parity detector; :func:`find_bridge_path`
builds those detector-assisted paths.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .detector import (
    Parity,
    measure_parity,
    measure_polarized_parity,
    parity_projectors,
    polarized_parity_projectors,
)
from .fock import amplitude_matrix, matrix_rank, projector, same_up_to_phase
from .optics import BS, ElementSpec, canonical_state, lifted, pdps, pips, pr

DEFAULT_MAX_DEPTH = 8
PHASE_TOL = 1e-9


class EquivalenceSet(str, enum.Enum):
    S1 = "S1"
    S2 = "S2"
    OUTSIDE = "outside"


# The generators drawn in the PO-equivalence diagram. A polarization-independent
# phase on one spatial mode only multiplies dual-rail states by a global phase,
# so these alone cannot link 1-LR with 1+LR.
FIG2_GATES: tuple[ElementSpec, ...] = (
    pips(np.pi, "L"),
    pips(np.pi, "R"),
    pips(np.pi / 2, "L"),
    pips(np.pi / 2, "R"),
    pr(np.pi / 2, "L"),
    pr(np.pi / 2, "R"),
    pr(np.pi / 2, "both"),
    BS,
)

# pi phase on the down polarization of one mode: the element that actually
# realizes the 1-LR <-> 1+LR and 2-LR <-> 2+LR links.
PDPS_GATES: tuple[ElementSpec, ...] = (pdps(np.pi, "L", "down"), pdps(np.pi, "R", "down"))


def po_gate_set(include_pdps: bool = True) -> list[ElementSpec]:
    """Generators searched by :func:`find_po_path`, in tie-breaking order."""
    return list(FIG2_GATES + (PDPS_GATES if include_pdps else ()))


def amplitude_rank(psi: np.ndarray, tol: float = 1e-8) -> int:
    return matrix_rank(amplitude_matrix(psi), tol)


def classify_set(psi: np.ndarray) -> EquivalenceSet:
    """S1 for amplitude rank 4, S2 for rank 2, OUTSIDE otherwise."""
    rank = amplitude_rank(psi)
    if rank == 4:
        return EquivalenceSet.S1
    if rank == 2:
        return EquivalenceSet.S2
    return EquivalenceSet.OUTSIDE


def phase_key(psi: np.ndarray, decimals: int = 6) -> tuple[float, ...]:
    """Hashable representative of ``psi`` up to global phase.

    The first amplitude with modulus above 1e-9 is rotated to the positive
    real axis before rounding.
    """
    k = int(np.flatnonzero(np.abs(psi) > PHASE_TOL)[0])
    psi = psi * np.exp(-1j * np.angle(psi[k]))
    return tuple(np.round(np.concatenate([psi.real, psi.imag]), decimals) + 0.0)


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class Measurement:
    """Parity check on a spatial mode, or on one polarization of it when ``polarization`` is set."""

    spatial: str = "L"
    polarization: str | None = None

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        if self.polarization is None:
            return parity_projectors(self.spatial)
        return polarized_parity_projectors(self.spatial, self.polarization)

    def measure(self, rho: np.ndarray):
        if self.polarization is None:
            return measure_parity(rho)
        return measure_polarized_parity(rho, self.spatial, self.polarization)

    @property
    def label(self) -> str:
        if self.polarization is None:
            return f"D on {self.spatial}"
        arrow = "↑" if self.polarization == "up" else "↓"
        return f"PBS + D + PBS on {self.spatial}{arrow}"


@dataclass(frozen=True)
class GateStep:
    element: ElementSpec | None = None
    measurement: Measurement | None = None
    outcome: Parity | None = None
    probability: float = 1.0

    @property
    def is_detector(self) -> bool:
        return self.measurement is not None

    @property
    def description(self) -> str:
        if self.element is not None:
            return self.element.label
        return f"{self.measurement.label}, keep {self.outcome.value} (p = {self.probability:.12g})"

    def apply(self, psi: np.ndarray) -> tuple[np.ndarray, float]:
        """Next state and the probability of this step (1 for passive elements)."""
        if self.element is not None:
            return lifted(self.element) @ psi, 1.0
        odd, even = self.measurement.projectors()
        kept = (odd if self.outcome is Parity.ODD else even) @ psi
        p = float(np.vdot(kept, kept).real)
        if p == 0.0:
            raise ValueError(f"detector branch {self.outcome.value} has zero probability")
        return kept / np.sqrt(p), p


@dataclass(frozen=True)
class PathCertificate:
    source: str
    target: str
    steps: tuple[GateStep, ...]
    probability: float = 1.0

    @property
    def passive(self) -> bool:
        return not any(s.is_detector for s in self.steps)

    def replay(self) -> tuple[np.ndarray, list[float]]:
        psi = canonical_state(self.source).vector
        probs = []
        for step in self.steps:
            psi, p = step.apply(psi)
            probs.append(p)
        return psi, probs

    def verify(self, tol: float = 1e-9) -> bool:
        psi, probs = self.replay()
        return same_up_to_phase(psi, canonical_state(self.target).vector, tol) and abs(
            float(np.prod(probs)) - self.probability
        ) <= tol

    def lines(self) -> list[str]:
        out = [f"{self.source} -> {self.target}: {len(self.steps)} step(s), probability {self.probability:.12g}"]
        out += [f"  {i}. {s.description}" for i, s in enumerate(self.steps, 1)]
        return out

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "probability": self.probability,
            "steps": [
                {
                    "type": "detector" if s.is_detector else "element",
                    "description": s.description,
                    "probability": s.probability,
                }
                | ({"outcome": s.outcome.value} if s.is_detector else {})
                for s in self.steps
            ],
        }


def _search(source: np.ndarray, target: np.ndarray, gates: Sequence[ElementSpec], max_depth: int):
    # Level-by-level BFS; expanding in generator order makes the first hit the
    # lexicographically smallest among the shortest paths.
    if same_up_to_phase(source, target):
        return []
    seen = {phase_key(source)}
    frontier = [(source, [])]
    for _ in range(max_depth):
        nxt = []
        for psi, path in frontier:
            for gate in gates:
                phi = lifted(gate) @ psi
                if same_up_to_phase(phi, target):
                    return path + [gate]
                key = phase_key(phi)
                if key not in seen:
                    seen.add(key)
                    nxt.append((phi, path + [gate]))
        if not nxt:
            break
        frontier = nxt
    return None


def po_closure(source: np.ndarray, gates: Iterable[ElementSpec] | None = None,
               max_depth: int | None = None) -> list[np.ndarray]:
    """All states reachable from ``source`` with the generators, one per phase class."""
    gates = po_gate_set() if gates is None else list(gates)
    seen = {phase_key(source)}
    states = [source]
    frontier = [source]
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        nxt = []
        for psi in frontier:
            for gate in gates:
                phi = lifted(gate) @ psi
                key = phase_key(phi)
                if key not in seen:
                    seen.add(key)
                    states.append(phi)
                    nxt.append(phi)
        frontier = nxt
        depth += 1
    return states


def find_po_path(source: str, target: str, max_depth: int = DEFAULT_MAX_DEPTH,
                 gates: Sequence[ElementSpec] | None = None) -> PathCertificate | None:
    """Shortest passive path between two canonical states, or None if the search runs out."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    gates = po_gate_set() if gates is None else gates
    path = _search(canonical_state(source).vector, canonical_state(target).vector, gates, max_depth)
    if path is None:
        return None
    return PathCertificate(source, target, tuple(GateStep(element=g) for g in path))


def _po_segment(source: str, target: str, max_depth: int) -> list[GateStep]:
    cert = find_po_path(source, target, max_depth)
    if cert is None:
        raise RuntimeError(f"no passive path {source} -> {target} within depth {max_depth}")
    return list(cert.steps)


def find_bridge_path(source: str, target: str, max_depth: int = DEFAULT_MAX_DEPTH) -> PathCertificate:
    """Detector-assisted path between canonical states in different sets.

    S1 -> S2 goes through 2+LR: a polarization-sensitive parity check on L-up
    separates |L↑,R↑> from |L↓,R↓>, and a BS turns them into U-NO or D-NO.
    S2 -> S1 goes through U-NO: BS, PR on R and BS give
    (1-NO - 1-LR)/sqrt(2), and D keeps 1-LR (odd) or 1-NO (even).
    Each certificate follows one detector branch of probability 1/2.
    """
    src_set = classify_set(canonical_state(source).vector)
    tgt_set = classify_set(canonical_state(target).vector)
    if src_set == tgt_set:
        raise ValueError(f"{source} and {target} are both in {src_set.value}; use find_po_path")

    if src_set is EquivalenceSet.S1:
        outcome, landing = (Parity.ODD, "U-NO") if target[0] == "U" else (Parity.EVEN, "D-NO")
        steps = _po_segment(source, "2+LR", max_depth)
        steps += [GateStep(measurement=Measurement("L", "up"), outcome=outcome), GateStep(element=BS)]
    else:
        outcome, landing = (Parity.ODD, "1-LR") if target.endswith("LR") else (Parity.EVEN, "1-NO")
        steps = _po_segment(source, "U-NO", max_depth)
        steps += [
            GateStep(element=BS),
            GateStep(element=pr(np.pi / 2, "R")),
            GateStep(element=BS),
            GateStep(measurement=Measurement("L"), outcome=outcome),
        ]
    steps += _po_segment(landing, target, max_depth)

    # Fill in branch probabilities by replaying the recipe.
    psi = canonical_state(source).vector
    filled = []
    total = 1.0
    for step in steps:
        psi_next, p = step.apply(psi)
        if step.is_detector:
            step = GateStep(measurement=step.measurement, outcome=step.outcome, probability=p)
            total *= p
        filled.append(step)
        psi = psi_next
    return PathCertificate(source, target, tuple(filled), total)


def find_path(source: str, target: str, max_depth: int = DEFAULT_MAX_DEPTH,
              allow_detector: bool = False) -> PathCertificate | None:
    """Passive path when one exists; otherwise a bridge path if ``allow_detector``."""
    cert = find_po_path(source, target, max_depth)
    if cert is None and allow_detector:
        src_set = classify_set(canonical_state(source).vector)
        if src_set != classify_set(canonical_state(target).vector):
            return find_bridge_path(source, target, max_depth)
    return cert


def branch_probability_matches(step: GateStep, psi: np.ndarray, tol: float = 1e-12) -> bool:
    """Check a detector step's recorded probability against the detector module."""
    odd, even = step.measurement.measure(projector(psi))
    record = odd if step.outcome is Parity.ODD else even
    return abs(record.probability - step.probability) <= tol
