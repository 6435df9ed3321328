import itertools

import numpy as np
import pytest

from conftest import random_unitary
from parity_distill.detector import Parity
from parity_distill.equivalence import (
    FIG2_GATES,
    EquivalenceSet,
    Measurement,
    amplitude_rank,
    branch_probability_matches,
    classify_set,
    find_bridge_path,
    find_path,
    find_po_path,
    phase_key,
    po_closure,
    po_gate_set,
)
from parity_distill.fock import basis_ket, lift_unitary, same_up_to_phase
from parity_distill.optics import BS, CANONICAL_NAMES, lifted, pdps, state

S1 = [n for n in CANONICAL_NAMES if n.endswith("LR") or n.startswith("1")]
S2 = [n for n in CANONICAL_NAMES if n not in S1]


def test_gate_sets():
    assert len(FIG2_GATES) == 8
    gates = po_gate_set()
    assert len(gates) == 10 and gates[:8] == list(FIG2_GATES)
    assert po_gate_set(include_pdps=False) == list(FIG2_GATES)


def test_partition_by_rank():
    assert sorted(S1) == sorted(["1-LR", "1+LR", "2-LR", "2+LR", "1-NO", "1+NO"])
    for n in S1:
        assert amplitude_rank(state(n)) == 4 and classify_set(state(n)) is EquivalenceSet.S1
    for n in S2:
        assert amplitude_rank(state(n)) == 2 and classify_set(state(n)) is EquivalenceSet.S2


def test_product_state_is_outside():
    assert classify_set(basis_ket((2, 0, 0, 0))) is EquivalenceSet.OUTSIDE
    assert amplitude_rank(basis_ket((1, 0, 0, 1))) == 2


def test_phase_key_ignores_global_phase(rng):
    psi = state("2-LR")
    assert phase_key(psi) == phase_key(np.exp(1.3j) * psi)
    assert phase_key(psi) != phase_key(state("2+LR"))


def test_single_step_examples():
    cert = find_po_path("1-LR", "1+LR")
    assert len(cert.steps) == 1 and cert.steps[0].element == pdps(np.pi, "L", "down")
    cert = find_po_path("1+LR", "1-NO")
    assert [s.element for s in cert.steps] == [BS]
    assert cert.passive and cert.probability == 1.0


def test_identity_path_is_empty():
    cert = find_po_path("U+NO", "U+NO")
    assert cert.steps == () and cert.verify()


@pytest.mark.parametrize("a,b", list(itertools.combinations(S1, 2)) + list(itertools.combinations(S2, 2)))
def test_same_set_pairs_connected(a, b):
    for src, tgt in ((a, b), (b, a)):
        cert = find_po_path(src, tgt)
        assert cert is not None and cert.verify()
        assert len(cert.steps) <= 8


def test_diagram_generators_alone_miss_a_link():
    assert find_po_path("1-LR", "1+LR", gates=FIG2_GATES) is None


def test_cross_set_has_no_passive_path():
    assert find_po_path("1-LR", "U-NO") is None
    assert find_path("1-LR", "U-NO") is None


def test_closure_of_singlet_stays_in_s1():
    closure = po_closure(state("1-LR"))
    assert {amplitude_rank(psi) for psi in closure} == {4}
    for n in S2:
        assert not any(same_up_to_phase(psi, state(n)) for psi in closure)
    for n in S1:
        assert any(same_up_to_phase(psi, state(n)) for psi in closure)


def test_rank_invariant_under_generators_and_random_unitaries(rng):
    for name in CANONICAL_NAMES:
        r = amplitude_rank(state(name))
        for g in po_gate_set():
            assert amplitude_rank(lifted(g) @ state(name)) == r
        for _ in range(5):
            assert amplitude_rank(lift_unitary(random_unitary(rng)) @ state(name)) == r


@pytest.mark.parametrize("src,tgt", [("2+LR", "U-NO"), ("U-NO", "1-LR")])
def test_bridge_examples(src, tgt):
    cert = find_bridge_path(src, tgt)
    assert cert.verify() and not cert.passive
    detector_steps = [s for s in cert.steps if s.is_detector]
    assert len(detector_steps) == 1
    assert detector_steps[0].probability == pytest.approx(0.5, abs=1e-12)
    assert cert.probability == pytest.approx(0.5, abs=1e-12)


def test_all_cross_pairs_bridge():
    for a, b in itertools.product(S1, S2):
        for src, tgt in ((a, b), (b, a)):
            cert = find_bridge_path(src, tgt)
            assert cert.verify(), (src, tgt)
            assert cert.probability >= 0.5 - 1e-12


def test_bridge_probabilities_match_detector_records():
    for src, tgt in (("1-NO", "D+NO"), ("D-NO", "2-LR")):
        cert = find_bridge_path(src, tgt)
        psi = state(src)
        for step in cert.steps:
            if step.is_detector:
                assert branch_probability_matches(step, psi)
            psi, _ = step.apply(psi)


def test_bridge_rejects_same_set():
    with pytest.raises(ValueError):
        find_bridge_path("1-LR", "2+LR")


def test_find_path_with_detector():
    assert find_path("1-LR", "U-NO", allow_detector=True).verify()
    assert find_path("1-LR", "1+LR", allow_detector=True).passive


def test_measurement_labels():
    assert Measurement("L").label == "D on L"
    assert "L↑" in Measurement("L", "up").label


def test_certificate_serialization():
    d = find_bridge_path("2+LR", "U-NO").to_dict()
    kinds = [s["type"] for s in d["steps"]]
    assert kinds.count("detector") == 1
    assert [s for s in d["steps"] if s["type"] == "detector"][0]["outcome"] == Parity.ODD.value
    lines = find_po_path("1+LR", "1-NO").lines()
    assert lines[0].startswith("1+LR -> 1-NO: 1 step(s)") and lines[1] == "  1. BS"


def test_max_depth_validation():
    with pytest.raises(ValueError):
        find_po_path("1-LR", "1+LR", max_depth=0)
