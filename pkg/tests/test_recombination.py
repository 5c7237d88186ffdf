from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import coupling_matrix, hand_model
from radrec.errors import DomainError, InvalidModel, NonPhysicalCrossSection, PoleOutsideGrid
from radrec.fixtures import reference_model
from radrec.io import model_from_dict
from radrec.recombination import (PhotonGrid, assemble_cross_section, class_coefficients,
                                  extract_amplitude, lowest_order_coefficient, se_bound_coefficient,
                                  se_free_coefficient, vertex_coefficient)
from radrec.spectral import EnergyDependentOperator


# --- lowest order -----------------------------------------------------------

def test_lowest_single_channel():
    p = 1 + 4
    m = hand_model(coupling_matrix(10, {(0, p): 0.5}))
    e = lowest_order_coefficient(m)
    assert e.coefficient == 0.25
    assert e.omega_star == pytest.approx(m.eps_p - m.eps_a)


def test_lowest_zero_coupling():
    assert lowest_order_coefficient(hand_model(np.zeros((10, 10)))).coefficient == 0.0


def test_lowest_two_degenerate_targets():
    p = 2 + 4
    a = coupling_matrix(11, {(0, p): 0.3, (1, p): 0.4j})
    m = hand_model(a, bound=(-0.5, -0.5))
    assert m.targets() == [0, 1]
    assert lowest_order_coefficient(m).coefficient == pytest.approx(0.25, abs=1e-15)


def test_omega_outside_photon_grid():
    m = hand_model(np.zeros((10, 10)), photons=(0.2, 0.6, 5))
    with pytest.raises(PoleOutsideGrid):
        lowest_order_coefficient(m)


def test_photon_grid_refinement_stability():
    # smooth A(omega) sampled on n and 2n modes; interpolated at omega*
    base = coupling_matrix(10, {(0, 5): 0.5 + 0.1j, (0, 3): 0.2, (1, 5): 0.1})
    prof = lambda w: np.exp(-0.3 * w) * (1 + 0.2 * np.sin(3 * w))
    values = []
    for n in (200, 400):
        om = np.linspace(0.2, 2.2, n)
        grid = PhotonGrid.sampled(om, np.full(n, om[1] - om[0]), [prof(w) * base for w in om])
        m = hand_model(base)
        m = type(m)(m.spectrum, grid, m.sigma, m.lambda_vx, m.v_i, m.capture_target, m.initial)
        values.append(lowest_order_coefficient(m).coefficient)
    assert abs(values[1] - values[0]) / values[1] <= 1e-6
    exact = abs(prof(m.omega_star) * base[0, 5]) ** 2
    assert values[1] == pytest.approx(exact, rel=1e-8)


# --- model validation -------------------------------------------------------

def test_model_invariants():
    a = coupling_matrix(10, {(0, 5): 0.5})
    with pytest.raises(InvalidModel, match="emission kinematics"):
        hand_model(a, bound=(1.5,))
    with pytest.raises(InvalidModel):
        hand_model(a, target=3)
    with pytest.raises(InvalidModel):
        hand_model(a, p_index=0, target=0)
    with pytest.raises(InvalidModel):
        hand_model(a, v_i=0.0)
    with pytest.raises(InvalidModel):
        hand_model(a, vertex_sign=2)
    bad = a.copy()
    bad[0, 5] = 1.0
    with pytest.raises(InvalidModel, match="Hermitian"):
        hand_model(bad)


# --- bound-state self-energy ------------------------------------------------

def test_se_bound_zero_sigma():
    e = se_bound_coefficient(hand_model(coupling_matrix(10, {(0, 5): 0.5})))
    assert all(v == 0 for v in e.terms.values())
    assert e.coefficient == 0


def test_se_bound_constant_operators_have_no_msc():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
    sig = 0.01 * (x + x.conj().T)
    e = se_bound_coefficient(hand_model(coupling_matrix(10, {(0, 5): 0.5, (2, 5): 0.1}), sigma=sig))
    assert e.terms["d/dE(A q Sigma) q A"] == 0
    assert e.terms["A q Sigma q dA/dE"] == 0
    assert e.terms["A q Sigma G_Q A"] != 0


def _se_bound_oracle(model):
    # compose the four terms directly from dense matrices and analytic derivatives
    s = model.spectrum
    p, a_id = model.initial, model.capture_target
    w = model.omega_star
    A, Sig = model.photons.coupling, model.sigma
    aw, da = A.evaluate(w), A.derivative(w)
    sa, dsa = Sig.evaluate(model.eps_a), Sig.derivative(model.eps_a)
    gq = np.diag([0.0 if i == a_id else 1.0 / (model.eps_a - e) for i, e in enumerate(s.energies)])
    q = np.zeros(s.dimension)
    q[a_id] = 1.0
    q = np.diag(q)
    return {
        "A q Sigma G_Q A": aw[p, a_id] * (sa @ gq @ aw)[a_id, p],
        "A G_Q Sigma q A": (aw @ gq @ sa)[p, a_id] * aw[a_id, p],
        "d/dE(A q Sigma) q A": ((da @ q @ sa + aw @ q @ dsa) @ q @ aw)[p, p],
        "A q Sigma q dA/dE": aw[p, a_id] * sa[a_id, a_id] * da[a_id, p],
    }


def test_se_bound_matches_dense_oracle(ref_model):
    e = se_bound_coefficient(ref_model)
    oracle = _se_bound_oracle(ref_model)
    for name, val in oracle.items():
        assert abs(e.terms[name] - val) <= 1e-10 * max(1.0, abs(val)), name
    assert e.coefficient == pytest.approx(sum(oracle.values()).real, abs=1e-12)


def test_se_bound_conjugate_pairing(ref_model):
    e = se_bound_coefficient(ref_model)
    assert e.terms["A q Sigma G_Q A"] == pytest.approx(np.conj(e.terms["A G_Q Sigma q A"]), abs=1e-15)


def test_se_bound_fd_window_error():
    # A known only on a window so narrow the FD stencil around omega* leaves it
    m = hand_model(coupling_matrix(10, {(0, 5): 0.5}), sigma=np.eye(10) * 0.01)
    A = np.asarray(m.photons.coupling(m.omega_star))
    w0 = m.omega_star
    coupling = EnergyDependentOperator(lambda w: A, None, "A", (w0 - 1e-6, w0 + 1e-6))
    om = np.array([w0 - 1e-6, w0 + 1e-6])
    m2 = type(m)(m.spectrum, PhotonGrid(om, np.ones(2), coupling), m.sigma, m.lambda_vx, 1.0, 0, m.initial)
    with pytest.raises(DomainError):
        se_bound_coefficient(m2)


# --- vertex -----------------------------------------------------------------

def test_vertex_zero():
    assert vertex_coefficient(hand_model(coupling_matrix(10, {(0, 5): 0.5}))).coefficient == 0


@pytest.mark.parametrize("sign", [-1, 1])
def test_vertex_lambda_equal_a(sign):
    a = coupling_matrix(10, {(0, 5): 0.3 + 0.4j, (2, 5): 0.1})
    e = vertex_coefficient(hand_model(a, lam=a, vertex_sign=sign))
    # both cut terms equal |<a|A|p>|^2; the coefficient is their real sum
    assert e.coefficient == pytest.approx(sign * 2 * 0.25, abs=1e-15)


def test_vertex_dense_oracle(ref_model):
    m = ref_model
    p, a_id = m.initial, m.capture_target
    aw = m.photons.coupling(m.omega_star)
    lam = m.lambda_vx(m.eps_p)
    expect = m.vertex_sign * (lam[p, a_id] * aw[a_id, p] + aw[p, a_id] * lam[a_id, p])
    e = vertex_coefficient(m)
    assert abs(e.coefficient - expect.real) <= 1e-12
    assert abs(e.terms["Lambda q A"] - np.conj(e.terms["A q Lambda"])) <= 1e-15


# --- free-electron self-energy ---------------------------------------------

def test_se_free_zero_sigma():
    e = se_free_coefficient(hand_model(coupling_matrix(10, {(0, 5): 0.5})))
    assert e.coefficient == 0 and all(v == 0 for v in e.terms.values())


def test_se_free_bound_only_sigma_has_no_pole():
    sig = coupling_matrix(10, {(0, 0): 0.01, (0, 2): 0.02})
    e = se_free_coefficient(hand_model(coupling_matrix(10, {(0, 5): 0.5, (0, 2): 0.1}), sigma=sig))
    assert all(v == 0 for v in e.terms.values())


def _pole_per_weight(doc, n, eta_factor=None):
    doc["spectrum"]["continuum"]["n_points"] = n
    m = model_from_dict(doc)
    eta = None if eta_factor is None else eta_factor * 1.5 / (n - 1)
    e = se_free_coefficient(m, eta=eta)
    w_p = m.spectrum.states[m.initial].weight
    return e.terms["A q A G_pole Sigma"] / w_p, e.terms["Sigma G_pole* A q A"] / w_p


def test_se_free_pole_matches_eta_oracle(separable_doc):
    got = _pole_per_weight(separable_doc, 61)
    coarse = _pole_per_weight(separable_doc, 481, eta_factor=5)
    fine = _pole_per_weight(separable_doc, 961, eta_factor=5)
    for k in range(2):
        oracle = 2 * fine[k] - coarse[k]
        assert abs(got[k] - oracle) <= 1e-3 * abs(oracle)
    assert abs(got[0]) > 0


def test_se_free_reports_pv_separately(separable_doc):
    e = se_free_coefficient(model_from_dict(separable_doc))
    assert set(e.extra) == {"A q A G_PV Sigma", "Sigma G_PV A q A"}
    assert e.coefficient == pytest.approx(sum(e.terms.values()).real, abs=1e-15)


def test_se_free_pole_outside_grid(separable_doc):
    separable_doc["initial_state"] = {"energy": 0.05}
    with pytest.raises(PoleOutsideGrid):
        se_free_coefficient(model_from_dict(separable_doc))


# --- reality and structure --------------------------------------------------

@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_hermitian_inputs_give_real_coefficients(seed):
    m = reference_model(seed=seed, n_continuum=31, n_photons=21)
    for e in class_coefficients(m):
        scale = max(1.0, max(abs(v) for v in e.terms.values()))
        assert e.imaginary_residue <= 1e-12 * scale, e.label
        assert e.coefficient == pytest.approx(sum(e.terms.values()).real, abs=1e-12)


def test_class_order_fixed(ref_model):
    assert [e.label for e in class_coefficients(ref_model)] == ["lowest", "se_bound", "vertex", "se_free"]


# --- cross section ----------------------------------------------------------

def test_cross_section_arithmetic():
    a = coupling_matrix(10, {(0, 5): 0.5})
    m = hand_model(a)
    entries = [lowest_order_coefficient(m)]
    assert assemble_cross_section(entries, m, dk=1.0) == pytest.approx((2 * np.pi) ** 3 * 0.25)
    assert assemble_cross_section(entries, m, dk=1.0) == pytest.approx(62.0126, rel=1e-5)
    m2 = hand_model(a, v_i=2.0)
    assert assemble_cross_section(entries, m2, dk=1.0) == pytest.approx(
        0.5 * assemble_cross_section(entries, m, dk=1.0), rel=1e-15)
    zero = hand_model(np.zeros((10, 10)))
    assert assemble_cross_section([lowest_order_coefficient(zero)], zero) == 0


def test_cross_section_additive(ref_model):
    entries = class_coefficients(ref_model)[:1] + class_coefficients(ref_model)[2:]
    parts = sum(assemble_cross_section([e], ref_model) for e in entries)
    assert assemble_cross_section(entries, ref_model) == pytest.approx(parts, rel=1e-13)


def test_negative_total_warns():
    m = hand_model(coupling_matrix(10, {(0, 5): 0.1}), lam=coupling_matrix(10, {(0, 5): 1.0}))
    with pytest.warns(NonPhysicalCrossSection):
        assemble_cross_section(class_coefficients(m), m)


# --- amplitude --------------------------------------------------------------

def test_amplitude_lowest_only():
    a = coupling_matrix(10, {(0, 5): 0.3 - 0.2j})
    amps = extract_amplitude(hand_model(a))
    assert list(amps) == [0]
    assert amps[0].total == a[0, 5]


def test_amplitude_factors_symbolic(ref_model):
    amp = extract_amplitude(ref_model)[0]
    assert amp.term("dSigma/dE q A").factor == Fraction(1, 2)
    assert amp.term("Sigma q dA/dE").factor == Fraction(1)
    assert amp.term("Lambda").factor == Fraction(ref_model.vertex_sign)


def test_amplitude_square_matches_coefficients(ref_model):
    # |tau|^2 = |tau0|^2 + 2 Re(tau0* dtau) + |dtau|^2; the coefficients carry the
    # first two pieces, so the mismatch is exactly the second-order |dtau|^2
    amps = extract_amplitude(ref_model)
    tau_sq = sum(abs(a.total) ** 2 for a in amps.values())
    second = sum(abs(a.total - a.term("A").value) ** 2 for a in amps.values())
    total = sum(e.coefficient for e in class_coefficients(ref_model))
    assert tau_sq - total == pytest.approx(second, rel=1e-9)
