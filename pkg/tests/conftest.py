from collections import defaultdict
from math import factorial, prod, sqrt

import numpy as np
import pytest

from parity_distill.fock import BASIS, DIM, basis_index


def creation_operator_image(u, occ):
    """Image of |occ> under u, by substituting a_b^dag -> sum_a u[a, b] a_a^dag and expanding.

    Independent of the permanent formula: it multiplies out the two linear forms
    as commuting monomials and converts a_x^dag a_y^dag |vac> to normalized
    occupation states.
    """
    modes = [m for m, n in enumerate(occ) for _ in range(n)]
    poly = defaultdict(complex)
    for x in range(4):
        for y in range(4):
            poly[tuple(sorted((x, y)))] += u[x, modes[0]] * u[y, modes[1]]
    out = np.zeros(DIM, dtype=complex)
    for (x, y), c in poly.items():
        o = [0, 0, 0, 0]
        o[x] += 1
        o[y] += 1
        out[basis_index(o)] += c * sqrt(prod(factorial(n) for n in o)) / sqrt(prod(factorial(n) for n in occ))
    return out


def lift_by_expansion(u):
    return np.column_stack([creation_operator_image(u, occ) for occ in BASIS])


def random_unitary(rng, n=4):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, dim=DIM, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_ket(rng, dim=DIM):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
