import copy

import numpy as np
import pytest

from radrec.fixtures import reference_model
from radrec.recombination import PhotonGrid, RadRecModel
from radrec.spectral import EnergyDependentOperator, build_spectrum

MINIMAL = {
    "schema_version": 1,
    "spectrum": {"bound": [-0.5], "continuum": {"min": 0.1, "max": 0.9, "n_points": 3}},
    "initial_state": 2,
    "capture_target": 0,
    "v_i": 1.0,
    "photons": {"grid": {"min": 0.2, "max": 1.6, "n_points": 8},
                "coupling": {"type": "constant",
                             "matrix": [[0, 0.3, [0.2, 0.1], 0.1], [0.3, 0, 0, 0],
                                        [[0.2, -0.1], 0, 0, 0], [0.1, 0, 0, 0]]}},
    "sigma": {"type": "zero"},
    "lambda": {"type": "zero"},
}

SEPARABLE_DOC = {
    "schema_version": 1,
    "spectrum": {"bound": [-0.5, -0.2],
                 "continuum": {"min": 0.05, "max": 1.55, "n_points": 61}},
    "initial_state": {"energy": 0.8},
    "capture_target": 0,
    "v_i": 1.3,
    "photons": {
        "grid": {"min": 0.4, "max": 2.6, "n_points": 31},
        "coupling": {"type": "separable", "scale": 1.0, "slope": 0.1,
                     "vector": {"bound": [1.0, [0.3, 0.2]], "continuum_poly": [0.8, [-0.2, 0.1]]}},
    },
    "sigma": {"type": "separable", "scale": 0.002, "slope": 0.001,
              "vector": {"bound": [0.5, 0.4], "continuum_poly": [[0.3, 0.1], 0.2, [0.1, -0.4]]}},
    "lambda": {"type": "separable", "scale": 0.001,
               "vector": {"bound": [0.2, [0.1, -0.1]], "continuum_poly": [0.5]}},
}


@pytest.fixture
def separable_doc():
    return copy.deepcopy(SEPARABLE_DOC)


@pytest.fixture(scope="session")
def ref_model():
    return reference_model()


def hand_model(A, sigma=None, lam=None, bound=(-0.5,), n_cont=9, p_index=None, v_i=1.0,
               photons=(0.2, 2.2, 21), target=0, vertex_sign=-1):
    """Small model with constant operators given as full matrices."""
    s = build_spectrum(list(bound), {"min": 0.1, "max": 0.9, "n_points": n_cont})
    dim = s.dimension
    zero = np.zeros((dim, dim))
    om = np.linspace(*photons)
    A = np.asarray(A, dtype=complex)
    coupling = EnergyDependentOperator(lambda w: A, lambda w: np.zeros_like(A), "A", (om[0], om[-1]))
    if p_index is None:
        p_index = len(bound) + n_cont // 2
    return RadRecModel(s, PhotonGrid(om, np.full(om.size, om[1] - om[0]), coupling),
                       EnergyDependentOperator.constant_op(zero if sigma is None else sigma, "Sigma"),
                       EnergyDependentOperator.constant_op(zero if lam is None else lam, "Lambda"),
                       v_i, target, p_index, vertex_sign)


def coupling_matrix(dim, entries):
    """Hermitian matrix with the given (i, j) -> value entries mirrored."""
    m = np.zeros((dim, dim), dtype=complex)
    for (i, j), v in entries.items():
        m[i, j] = v
        m[j, i] = np.conj(v)
    return m


# acceptance criteria outcomes, filled by test_acceptance and printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {line}")
