"""Reference toy models used by the verification suites, tests and demos."""
from __future__ import annotations

import numpy as np

from .greens import ladder_evaluator
from .recombination import PhotonGrid, RadRecModel
from .spectral import EnergyDependentOperator, ModelSpace, Spectrum, build_spectrum


def smooth_hermitian(spectrum: Spectrum, rng: np.random.Generator, rank: int = 3,
                     scale: float = 1.0) -> np.ndarray:
    """Random Hermitian operator ``G diag(lam) G^H`` smooth across the continuum.

    Bound rows of G are random complex numbers; continuum rows are smooth
    complex profiles times sqrt(w), so products over the continuum behave as
    quadratures of smooth densities.
    """
    e = spectrum.energies
    g = np.zeros((spectrum.dimension, rank), dtype=complex)
    bound = spectrum.bound_ids
    cont = spectrum.continuum_ids
    g[bound] = rng.normal(size=(len(bound), rank)) + 1j * rng.normal(size=(len(bound), rank))
    if cont:
        x = e[cont][:, None]
        c0 = rng.normal(size=rank) + 1j * rng.normal(size=rank)
        c1 = rng.normal(size=rank) + 1j * rng.normal(size=rank)
        k = np.arange(1, rank + 1)
        prof = np.exp(-x) * (c0 + c1 * x) * np.exp(1j * k * x)
        g[cont] = prof * spectrum.sqrt_weights()[cont][:, None]
    lam = rng.normal(size=rank)
    m = scale * (g * lam) @ g.conj().T
    return 0.5 * (m + m.conj().T)


def reference_model(seed: int = 7, n_continuum: int = 61, n_photons: int = 41,
                    vertex_sign: int = -1) -> RadRecModel:
    """Three bound levels plus a continuum, complex Hermitian couplings.

    Sigma is linear in energy, Lambda constant, A(omega) linear in omega;
    all carry analytic derivatives.
    """
    rng = np.random.default_rng(seed)
    spectrum = build_spectrum([-0.5, -0.2, -0.08],
                              {"min": 0.05, "max": 1.55, "n_points": n_continuum})
    nodes = spectrum.continuum_nodes
    p = spectrum.continuum_ids[int(np.argmin(np.abs(nodes - 0.8)))]
    a0 = smooth_hermitian(spectrum, rng, scale=1.0)
    a1 = smooth_hermitian(spectrum, rng, scale=0.2)
    s0 = smooth_hermitian(spectrum, rng, scale=0.002)
    s1 = smooth_hermitian(spectrum, rng, scale=0.001)
    lam = smooth_hermitian(spectrum, rng, scale=0.002)
    omegas = np.linspace(0.4, 2.6, n_photons)
    dw = omegas[1] - omegas[0]
    weights = np.full(n_photons, dw)
    coupling = EnergyDependentOperator(lambda w: a0 + w * a1, lambda w: a1, "A",
                                       (omegas[0], omegas[-1]))
    return RadRecModel(
        spectrum=spectrum,
        photons=PhotonGrid(omegas, weights, coupling),
        sigma=EnergyDependentOperator.linear(s0, s1, "Sigma"),
        lambda_vx=EnergyDependentOperator.constant_op(lam, "Lambda"),
        v_i=1.0,
        capture_target=0,
        initial=p,
        vertex_sign=vertex_sign,
    )


class CountertermToy:
    """Three states: a Q state at energy 1, an intermediate model state at E - gap,
    and the initial model state at E.  Couplings run initial -> intermediate (w)
    -> Q state (u), so U^(2)(E) ~ u w / (gap (E - 1)) while the counterterm
    leaves ``-u w/(E - 1)^2``.
    """

    def __init__(self, gap: float, energy: float = 0.0, u: float = 0.3, w: float = 0.5,
                 q_energy: float = 1.0):
        self.gap = gap
        self.energy = energy
        self.e_prime = energy - gap
        self.spectrum = build_spectrum([q_energy, self.e_prime, energy])
        self.model = ModelSpace([1, 2])
        v = np.zeros((3, 3))
        v[0, 1] = u
        v[1, 2] = w
        self.V = v
        self.U = [ladder_evaluator(self.spectrum, self.model, v, k) for k in (1, 2)]
        self.limit = -u * w / (energy - q_energy) ** 2

    def element(self, mat) -> complex:
        return complex(mat[0, 2])
