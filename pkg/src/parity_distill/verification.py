"""Acceptance checks, shared by ``parity-distill verify`` and the test suite.

Every check returns a :class:`CheckResult`; none of them raise on failure.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import equivalence as eq
from .channels import random_dual_rail_state, random_local_noise
from .detector import DetectorSpec, measure_parity
from .fock import lift_unitary, projector, same_up_to_phase, trace_norm
from .optics import CANONICAL_NAMES, make_element, BS, state
from .protocol import (
    ProtocolConfig,
    build_protocol_states,
    polarization_concurrence,
    run_exact,
    run_trajectories,
)

GRID = np.linspace(0.0, 1.0, 21)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.name}: {self.detail} ({self.seconds:.2f} s)"


def _closed_form_rho_no() -> np.ndarray:
    return sum(projector(state(n)) for n in ("1-NO", "U-NO", "D-NO")) / 3


def check_bs_table() -> tuple[bool, str]:
    t0 = time.perf_counter()
    U = lift_unitary(make_element(BS))
    s = state
    table = [
        ("1-LR", -s("1-LR")),
        ("1+LR", s("1-NO")),
        ("2-LR", (s("U-NO") - s("D-NO")) / np.sqrt(2)),
        ("2+LR", (s("U-NO") + s("D-NO")) / np.sqrt(2)),
    ]
    err = 0.0
    for name, image in table:
        err = max(err, np.max(np.abs(U @ s(name) - image)), np.max(np.abs(U @ image - s(name))))
    elapsed = time.perf_counter() - t0
    return err <= 1e-10 and elapsed < 1.0, f"max elementwise error {err:.2e}, {elapsed * 1e3:.1f} ms"


def check_rho_bs() -> tuple[bool, str]:
    rho_bs = build_protocol_states()["rho_BS"]
    expected = projector(state("1-LR")) / 4 + 3 * _closed_form_rho_no() / 4
    dist = trace_norm(rho_bs - expected)
    return dist <= 1e-12, f"trace-norm distance {dist:.2e}"


def check_success_probabilities() -> tuple[bool, str]:
    j = np.arange(1, 21)
    dep = np.array(run_exact(ProtocolConfig(max_iterations=20)).cumulative)
    ad = np.array(run_exact(ProtocolConfig(variant="amplitude-damping", max_iterations=20)).cumulative)
    err_dep = np.max(np.abs(dep - (1 - 0.75**j)))
    err_ad = np.max(np.abs(ad - (1 - 0.5**j)))
    err_two = abs(dep[1] - 0.4375)
    ok = max(err_dep, err_ad, err_two) <= 1e-12
    return ok, f"depolarizing {err_dep:.1e}, amplitude damping {err_ad:.1e}, p(2) = {float(dep[1])!r}"


def _faulty_rho_bs_records():
    rho_bs = build_protocol_states()["rho_BS"]
    for eps, eps_prime in itertools.product(GRID, GRID):
        odd, _ = measure_parity(rho_bs, DetectorSpec("L", float(eps), float(eps_prime)))
        yield float(eps), float(eps_prime), odd


def check_faulty_probability() -> tuple[bool, str]:
    err = max(abs(odd.probability - ((1 - e) / 4 + 3 * ep / 4)) for e, ep, odd in _faulty_rho_bs_records())
    return err <= 1e-12, f"max error {err:.2e} over 21x21 grid"


def check_faulty_concurrence() -> tuple[bool, str]:
    err = 0.0
    values = {}
    for e, ep, odd in _faulty_rho_bs_records():
        if e == 1.0 and ep == 0.0:
            continue
        c = polarization_concurrence(odd.post_state)
        values[(e, ep)] = c
        err = max(err, abs(c - (1 - e) / (1 - e + 3 * ep)))
    boundary = max(
        abs(values[(0.0, 0.0)] - 1.0),
        max(abs(values[(0.0, float(ep))] - 1 / (1 + 3 * ep)) for ep in GRID),
        max(abs(values[(1.0, float(ep))]) for ep in GRID[1:]),
    )
    ok = max(err, boundary) <= 1e-12
    return ok, f"max error {err:.2e} over grid, boundary error {boundary:.2e}"


def check_monte_carlo(trajectories: int = 100_000) -> tuple[bool, str]:
    t0 = time.perf_counter()
    result, _ = run_trajectories(ProtocolConfig(mode="monte-carlo", trajectories=trajectories, seed=2024))
    elapsed = time.perf_counter() - t0
    freq = result.cumulative[0]
    se = np.sqrt(0.25 * 0.75 / trajectories)
    z = (freq - 0.25) / se
    ok = abs(z) <= 4 and elapsed < 30
    return ok, f"success fraction {freq:.5f} ({z:+.2f} standard errors), {elapsed:.1f} s"


def canonical_result_json(result) -> str:
    payload = result.to_dict(include_state=True)
    return json.dumps(payload, sort_keys=True)


def check_robustness(n_states: int = 50) -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    serialized = set()
    for _ in range(n_states):
        rho = random_local_noise(random_dual_rail_state(rng, rank=int(rng.integers(1, 5))), rng)
        result = run_exact(ProtocolConfig(max_iterations=5, initial_state=rho))
        serialized.add(canonical_result_json(result))
    return len(serialized) == 1, f"{len(serialized)} distinct serialized result(s) from {n_states} noisy initial states"


def check_po_partition() -> tuple[bool, str]:
    sets = {n: eq.classify_set(state(n)) for n in CANONICAL_NAMES}
    ranks = {n: eq.amplitude_rank(state(n)) for n in CANONICAL_NAMES}
    s1 = [n for n in CANONICAL_NAMES if sets[n] is eq.EquivalenceSet.S1]
    s2 = [n for n in CANONICAL_NAMES if sets[n] is eq.EquivalenceSet.S2]
    pairs = list(itertools.combinations(s1, 2)) + list(itertools.combinations(s2, 2))
    depths = []
    missing = []
    for a, b in pairs:
        cert = eq.find_po_path(a, b, max_depth=8)
        if cert is None or not cert.verify():
            missing.append(f"{a}->{b}")
        else:
            depths.append(len(cert.steps))
    closure = eq.po_closure(state("1-LR"))
    leaked = [
        n for n in s2 if any(same_up_to_phase(psi, state(n)) for psi in closure)
    ] + [f"rank {r}" for r in {eq.amplitude_rank(psi) for psi in closure} if r != 4]
    ok = (
        len(pairs) == 21
        and not missing
        and all(ranks[n] == 4 for n in s1) and len(s1) == 6
        and all(ranks[n] == 2 for n in s2) and len(s2) == 4
        and not leaked
    )
    detail = (
        f"{len(pairs) - len(missing)}/{len(pairs)} same-set paths (max depth {max(depths, default=0)}), "
        f"S1 ranks {sorted(set(ranks[n] for n in s1))}, S2 ranks {sorted(set(ranks[n] for n in s2))}, "
        f"closure of 1-LR: {len(closure)} states, S2 members found: {leaked or 'none'}"
    )
    if missing:
        detail += f"; missing {', '.join(missing)}"
    return ok, detail


def check_bridges() -> tuple[bool, str]:
    details = []
    ok = True
    for source, target in (("2+LR", "U-NO"), ("U-NO", "1-LR")):
        cert = eq.find_bridge_path(source, target)
        psi, probs = cert.replay()
        branch = [p for p, s in zip(probs, cert.steps) if s.is_detector]
        good = (
            same_up_to_phase(psi, state(target), 1e-9)
            and len(branch) == 1
            and abs(branch[0] - 0.5) <= 1e-12
        )
        ok &= good
        details.append(f"{source}->{target} p={branch[0]:.12g}")
    return ok, ", ".join(details)


def check_qnd_repeatability(n_states: int = 100) -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(n_states):
        g = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        for first in measure_parity(rho):
            if first.post_state is None:
                continue
            again = {r.reported: r for r in measure_parity(first.post_state)}[first.reported]
            worst = max(worst, abs(again.probability - 1.0), np.max(np.abs(again.post_state - first.post_state)))
    return worst <= 1e-12, f"max deviation {worst:.2e} over {n_states} random states"


CHECKS: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "beam-splitter table on Bell states", check_bs_table),
    (2, "rho_BS = 1/4 singlet + 3/4 rho_NO", check_rho_bs),
    (3, "cumulative success probabilities", check_success_probabilities),
    (4, "faulty-detector odd probability", check_faulty_probability),
    (5, "faulty-detector concurrence", check_faulty_concurrence),
    (6, "Monte Carlo vs exact success", check_monte_carlo),
    (7, "robustness to prior local noise", check_robustness),
    (8, "PO partition into S1 and S2", check_po_partition),
    (9, "detector bridges between S1 and S2", check_bridges),
    (10, "QND repeatability", check_qnd_repeatability),
]


def run_check(number: int) -> CheckResult:
    for n, name, fn in CHECKS:
        if n == number:
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crashing check is a failed check
                passed, detail = False, f"error: {exc!r}"
            return CheckResult(n, name, bool(passed), detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_all() -> list[CheckResult]:
    return [run_check(n) for n, _, _ in CHECKS]
