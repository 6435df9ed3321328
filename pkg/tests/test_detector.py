import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density
from parity_distill.detector import (
    DetectorSpec,
    Parity,
    composite_polarized_parity,
    measure_parity,
    measure_polarized_parity,
    parity_projectors,
)
from parity_distill.fock import basis_ket, check_density, projector
from parity_distill.optics import projector_LR, projector_NO, state
from parity_distill.protocol import build_protocol_states

RHO_BS = build_protocol_states()["rho_BS"]
RHO_NO = sum(projector(state(n)) for n in ("1-NO", "U-NO", "D-NO")) / 3


def test_spec_validation():
    with pytest.raises(ValueError):
        DetectorSpec(eps=1.2)
    with pytest.raises(ValueError):
        DetectorSpec(eps_prime=-0.1)
    with pytest.raises(ValueError):
        DetectorSpec(monitored="C")


def test_ideal_projectors_are_subspace_projectors():
    for mode in ("L", "R"):
        odd, even = parity_projectors(mode)
        np.testing.assert_allclose(odd, projector_LR(), atol=1e-12)
        np.testing.assert_allclose(even, projector_NO(), atol=1e-12)


def test_ideal_parity_on_rho_bs():
    odd, even = measure_parity(RHO_BS)
    assert odd.reported is Parity.ODD and even.reported is Parity.EVEN
    assert abs(odd.probability - 0.25) < 1e-12
    np.testing.assert_allclose(odd.post_state, projector(state("1-LR")), atol=1e-12)
    assert abs(even.probability - 0.75) < 1e-12
    np.testing.assert_allclose(even.post_state, RHO_NO, atol=1e-12)


@pytest.mark.parametrize("eps,eps_prime", [(0.1, 0.0), (0.0, 0.3), (0.2, 0.1), (0.7, 0.9), (1.0, 1.0)])
def test_faulty_parity_on_rho_bs(eps, eps_prime):
    odd, even = measure_parity(RHO_BS, DetectorSpec("L", eps, eps_prime))
    p_lr = (1 - eps) / 4 + 3 * eps_prime / 4
    assert abs(odd.probability - p_lr) < 1e-12
    assert abs(even.probability - (3 * (1 - eps_prime) / 4 + eps / 4)) < 1e-12
    singlet = projector(state("1-LR"))
    expected_odd = ((1 - eps) * singlet + 3 * eps_prime * RHO_NO) / 4 / p_lr
    expected_even = (3 * (1 - eps_prime) * RHO_NO + eps * singlet) / 4 / (1 - p_lr)
    np.testing.assert_allclose(odd.post_state, expected_odd, atol=1e-12)
    np.testing.assert_allclose(even.post_state, expected_even, atol=1e-12)


def test_noon_state_is_even():
    odd, even = measure_parity(projector(state("U-NO")))
    assert even.probability == pytest.approx(1, abs=1e-12)
    assert odd.probability == 0 and odd.post_state is None


def test_zero_probability_branch():
    odd, even = measure_parity(RHO_BS, DetectorSpec("L", 1.0, 0.0))
    assert odd.probability == 0.0 and odd.post_state is None
    assert even.probability == pytest.approx(1, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), eps=st.floats(0, 1), eps_prime=st.floats(0, 1))
def test_records_are_valid(seed, eps, eps_prime):
    rho = random_density(np.random.default_rng(seed))
    odd, even = measure_parity(rho, DetectorSpec("R", eps, eps_prime))
    assert abs(odd.probability + even.probability - 1) < 1e-12
    for rec in (odd, even):
        if rec.probability > 1e-12:
            check_density(rec.post_state)


def test_ideal_faulty_limit_matches_projection(rng):
    rho = random_density(rng)
    odd, even = measure_parity(rho, DetectorSpec("L", 0.0, 0.0))
    P = projector_LR()
    np.testing.assert_allclose(odd.post_state * odd.probability, P @ rho @ P, atol=1e-12)


def test_monitored_mode_symmetry(rng):
    for _ in range(10):
        rho = random_density(rng)
        for spec_l, spec_r in [(DetectorSpec("L", 0.1, 0.2), DetectorSpec("R", 0.1, 0.2))]:
            for a, b in zip(measure_parity(rho, spec_l), measure_parity(rho, spec_r)):
                assert a.probability == pytest.approx(b.probability, abs=1e-14)
                np.testing.assert_allclose(a.post_state, b.post_state, atol=1e-14)


def test_qnd_repeatability(rng):
    for _ in range(100):
        rho = random_density(rng)
        for first in measure_parity(rho):
            again = {r.reported: r for r in measure_parity(first.post_state)}[first.reported]
            assert again.probability == pytest.approx(1, abs=1e-12)
            np.testing.assert_allclose(again.post_state, first.post_state, atol=1e-12)


def test_polarized_parity_on_2plus():
    odd, even = measure_polarized_parity(projector(state("2+LR")), "L", "up")
    assert odd.probability == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(odd.post_state, projector(basis_ket((1, 0, 1, 0))), atol=1e-12)
    assert even.probability == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(even.post_state, projector(basis_ket((0, 1, 0, 1))), atol=1e-12)


def test_polarized_parity_on_down_down():
    odd, even = measure_polarized_parity(projector(basis_ket((0, 1, 0, 1))), "L", "up")
    assert even.probability == pytest.approx(1) and odd.post_state is None


def test_composite_matches_native(rng):
    for i in range(50):
        rho = random_density(rng)
        spatial, pol = ("L", "up") if i % 4 == 0 else (("R", "down"), ("L", "down"), ("R", "up"))[i % 4 - 1]
        native = measure_polarized_parity(rho, spatial, pol)
        composite = composite_polarized_parity(rho, spatial, pol)
        for a, b in zip(native, composite):
            assert a.probability == pytest.approx(b.probability, abs=1e-10)
            np.testing.assert_allclose(a.post_state, b.post_state, atol=1e-10)


def test_polarized_parity_differs_from_blind_parity():
    # |L-up, L-down> has two photons in L (even) but one in L-up (odd)
    rho = projector(basis_ket((1, 1, 0, 0)))
    assert measure_parity(rho)[1].probability == pytest.approx(1)
    assert measure_polarized_parity(rho, "L", "up")[0].probability == pytest.approx(1)
