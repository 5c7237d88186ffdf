"""Radiative recombination: 2 Im(-H_eff) by diagram class, cross section and amplitude.

Every class contribution is the coefficient ``C`` in
``2 Im <p|-H_eff|p> = 2 pi delta(eps_p - eps_a - omega) C`` with the photon
energy pinned to ``omega* = eps_p - eps_a``.  ``q`` runs over the bound
states degenerate with the capture target ``a``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InvalidModel, NonPhysicalCrossSection, PoleOutsideGrid
from .greens import msc_contribution
from .singularity import eta_regularized, plemelj_integrate, reduced_resolvent
from .spectral import (DEFAULT_DEGENERACY_TOL, EnergyDependentOperator, ModelSpace, Spectrum,
                       StateKind, block_projector)


@dataclass(frozen=True)
class PhotonGrid:
    """Scalar photon channels and the coupling ``A(omega)``."""

    omegas: np.ndarray
    weights: np.ndarray
    coupling: EnergyDependentOperator

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "weights", w)
        if om.ndim != 1 or om.size < 2 or om.shape != w.shape:
            raise InvalidModel("photon grid needs >= 2 modes with one weight each")
        if np.any(om < 0) or np.any(np.diff(om) <= 0):
            raise InvalidModel("photon energies must be nonnegative and strictly increasing")
        if np.any(w <= 0):
            raise InvalidModel("photon weights must be positive")

    @classmethod
    def sampled(cls, omegas, weights, matrices, tag="A") -> "PhotonGrid":
        """Coupling given per mode; off-grid values from a cubic spline in omega."""
        omegas = np.asarray(omegas, dtype=float)
        mats = np.asarray(matrices, dtype=complex)
        if mats.shape[0] != omegas.size:
            raise InvalidModel("one coupling matrix per photon mode is required")
        spline = CubicSpline(omegas, mats, axis=0)
        dspline = spline.derivative()
        lo, hi = omegas[0], omegas[-1]
        op = EnergyDependentOperator(lambda w: spline(w), lambda w: dspline(w), tag, (lo, hi))
        return cls(omegas, weights, op)

    def contains(self, omega: float) -> bool:
        return self.omegas[0] <= omega <= self.omegas[-1]

    def weight_at(self, omega: float) -> float:
        return float(np.interp(omega, self.omegas, self.weights))


@dataclass(frozen=True)
class RadRecModel:
    spectrum: Spectrum
    photons: PhotonGrid
    sigma: EnergyDependentOperator
    lambda_vx: EnergyDependentOperator
    v_i: float
    capture_target: int
    initial: int
    vertex_sign: int = -1
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL

    def __post_init__(self):
        s = self.spectrum
        for name, idx in (("capture_target", self.capture_target), ("initial", self.initial)):
            if not 0 <= idx < s.dimension:
                raise InvalidModel(f"{name} id {idx} outside the basis")
        if s.states[self.capture_target].kind is not StateKind.BOUND:
            raise InvalidModel("capture_target must be a bound state")
        if s.states[self.initial].kind is not StateKind.CONTINUUM:
            raise InvalidModel("initial state must be a continuum sample")
        if not self.eps_p > self.eps_a:
            raise InvalidModel("emission kinematics violated: eps_p must exceed eps_a")
        if not self.v_i > 0:
            raise InvalidModel("v_i must be positive")
        if self.vertex_sign not in (1, -1):
            raise InvalidModel("vertex_sign must be +1 or -1")
        for op, name in ((self.sigma, "sigma"), (self.lambda_vx, "lambda")):
            for e in (self.eps_a, self.eps_p):
                try:
                    m = op(e)
                except DomainError as exc:
                    raise InvalidModel(f"{name} not evaluable on [eps_a, eps_p]: {exc}") from None
                if np.shape(m) != (s.dimension, s.dimension):
                    raise InvalidModel(f"{name} has shape {np.shape(m)}, basis is {s.dimension}")
        for w in self.photons.omegas:
            a = np.asarray(self.photons.coupling(w))
            if a.shape != (s.dimension, s.dimension):
                raise InvalidModel(f"photon coupling has shape {a.shape}, basis is {s.dimension}")
            if np.max(np.abs(a - a.conj().T)) > 1e-12 * max(np.max(np.abs(a)), 1e-300):
                raise InvalidModel(f"photon coupling A({w}) is not Hermitian")

    @property
    def eps_p(self) -> float:
        return self.spectrum.states[self.initial].energy

    @property
    def eps_a(self) -> float:
        return self.spectrum.states[self.capture_target].energy

    @property
    def omega_star(self) -> float:
        return self.eps_p - self.eps_a

    @property
    def model(self) -> ModelSpace:
        """States degenerate with the initial electron."""
        return ModelSpace.degenerate(self.spectrum, self.eps_p, self.degeneracy_tol)

    def targets(self) -> list:
        """Bound states degenerate with the capture target (the final channels q)."""
        bound = self.spectrum.bound_ids
        return self.spectrum.degenerate_with(self.eps_a, self.degeneracy_tol, bound)

    def scaled(self, eps: float) -> "RadRecModel":
        """Same model with Sigma and Lambda multiplied by ``eps``."""
        return replace(self, sigma=self.sigma.scaled(eps), lambda_vx=self.lambda_vx.scaled(eps))


@dataclass
class ClassEntry:
    label: str
    coefficient: float
    terms: Dict[str, complex]
    omega_star: float
    extra: Dict[str, complex] = field(default_factory=dict)

    @property
    def imaginary_residue(self) -> float:
        return abs(sum(self.terms.values()).imag)


@dataclass(frozen=True)
class AmplitudeTerm:
    name: str
    factor: Fraction
    value: complex

    @property
    def contribution(self) -> complex:
        return complex(self.factor) * self.value


@dataclass
class Amplitude:
    channel: int
    terms: List[AmplitudeTerm]

    @property
    def total(self) -> complex:
        return sum((t.contribution for t in self.terms), 0j)

    def term(self, name: str) -> AmplitudeTerm:
        for t in self.terms:
            if t.name == name:
                return t
        raise KeyError(name)


# --- shared kinematics ------------------------------------------------------

def _kinematics(model: RadRecModel, p: Optional[int]):
    p = model.initial if p is None else p
    w = model.spectrum.states[p].energy - model.eps_a
    if not model.photons.contains(w):
        lo, hi = model.photons.omegas[[0, -1]]
        raise PoleOutsideGrid(f"omega*={w} outside photon grid [{lo}, {hi}]")
    targets = model.targets()
    pq = block_projector(model.spectrum.dimension, targets)
    return p, w, targets, pq


def lowest_order_coefficient(model: RadRecModel, p: Optional[int] = None) -> ClassEntry:
    """Sum over final channels of |<q|A(omega*)|p>|^2."""
    p, w, targets, _ = _kinematics(model, p)
    a = model.photons.coupling(w)
    terms = {f"A[p,{q}] A[{q},p]": complex(a[p, q] * a[q, p]) for q in targets}
    coeff = float(sum(abs(a[q, p]) ** 2 for q in targets))
    return ClassEntry("lowest", coeff, terms, w)


def _target_resolvent(model: RadRecModel, targets):
    return reduced_resolvent(model.spectrum, ModelSpace(targets, model.degeneracy_tol), model.eps_a)


def se_bound_coefficient(model: RadRecModel, p: Optional[int] = None) -> ClassEntry:
    """Self-energy on the bound line: two reduced-resolvent terms and two MSC terms.

    The derivative of the photon coupling is taken with respect to the photon
    energy (equal to d/dE at fixed final state).  The second MSC term puts
    that derivative on the right-hand vertex, which is the mirror image of the
    first term's and keeps the pair conjugate; its real part is unchanged.
    """
    p, w, targets, pq = _kinematics(model, p)
    A = model.photons.coupling
    aw, da = A(w), A.d(w)
    e_a = model.eps_a
    sig, dsig = model.sigma(e_a), model.sigma.d(e_a)
    gq = _target_resolvent(model, targets)

    def product(energy):
        return A(energy - e_a) @ pq @ model.sigma(energy - w)

    deriv = None
    if A.derivative is not None and model.sigma.derivative is not None:
        def deriv(energy):
            return (A.d(energy - e_a) @ pq @ model.sigma(energy - w)
                    + A(energy - e_a) @ pq @ model.sigma.d(energy - w))
    lo, hi = A.window
    u2 = EnergyDependentOperator(product, deriv, "A P Sigma", (lo + e_a, hi + e_a))
    try:
        msc = msc_contribution(u2, aw, model.eps_p, pq)
    except DomainError as exc:
        raise DomainError(f"se_bound MSC derivative: {exc}") from None

    terms = {
        "A q Sigma G_Q A": complex((aw @ pq @ sig @ gq @ aw)[p, p]),
        "A G_Q Sigma q A": complex((aw @ gq @ sig @ pq @ aw)[p, p]),
        "d/dE(A q Sigma) q A": complex(msc[p, p]),
        "A q Sigma q dA/dE": complex((aw @ pq @ sig @ pq @ da)[p, p]),
    }
    extra = {"dSigma part": complex((aw @ pq @ dsig @ pq @ aw)[p, p])}
    return ClassEntry("se_bound", float(sum(terms.values()).real), terms, w, extra)


def vertex_coefficient(model: RadRecModel, p: Optional[int] = None) -> ClassEntry:
    """Vertex correction, cut at the upper and at the lower state; no MSC."""
    p, w, targets, pq = _kinematics(model, p)
    aw = model.photons.coupling(w)
    lam = model.lambda_vx(model.spectrum.states[p].energy)
    s = model.vertex_sign
    terms = {
        "Lambda q A": complex(s * (lam @ pq @ aw)[p, p]),
        "A q Lambda": complex(s * (aw @ pq @ lam)[p, p]),
    }
    return ClassEntry("vertex", float(sum(terms.values()).real), terms, w)


def _free_resolvent_split(model: RadRecModel, weights_c: np.ndarray, x0: float, eta=None):
    """Return f(c) -> (PV, pole) of ``sum_n c_n/(x0 - eps_n + i0)`` over electron states n.

    Bound states enter the principal part as a plain sum; continuum samples go
    through the pole-subtracted quadrature on their density ``c_n / w_n``.
    """
    s = model.spectrum
    bound = s.bound_ids
    cont = s.continuum_ids
    e = s.energies

    def split(c):
        pv = complex(np.sum(c[bound] / (x0 - e[bound])))
        dens = c[cont] / weights_c
        if eta is None:
            r = plemelj_integrate(dens, x0, s)
        else:
            r = eta_regularized(dens, x0, s, eta)
        # 1/(x0 - x + i0) = -PV 1/(x - x0) - i pi delta
        return pv - r.principal, r.pole

    return split


def se_free_coefficient(model: RadRecModel, p: Optional[int] = None,
                        eta: Optional[float] = None) -> ClassEntry:
    """Self-energy on the free-electron line (incoming and inverted diagram).

    Only the half-pole parts enter the coefficient.  The inverted diagram is
    the Hermitian conjugate of the first, so its pole carries ``+i pi``.
    With ``eta`` the split uses the brute-force regularised kernel instead of
    pole subtraction.
    """
    p, w, targets, pq = _kinematics(model, p)
    s = model.spectrum
    x0 = s.states[p].energy
    aw = model.photons.coupling(w)
    sig = model.sigma(x0)
    m = aw @ pq @ aw
    split = _free_resolvent_split(model, s.continuum_weights, x0, eta)
    pv_x, pole_x = split(m[p, :] * sig[:, p])
    pv_y, pole_y = split(sig[p, :] * m[:, p])
    pole_y = -pole_y  # conjugate kernel on the outgoing line
    terms = {"A q A G_pole Sigma": pole_x, "Sigma G_pole* A q A": pole_y}
    extra = {"A q A G_PV Sigma": pv_x, "Sigma G_PV A q A": pv_y}
    return ClassEntry("se_free", float((pole_x + pole_y).real), terms, w, extra)


def _density_at(model, c, x0, eta):
    s = model.spectrum
    dens = c[s.continuum_ids] / s.continuum_weights
    if eta is None:
        return -plemelj_integrate(dens, x0, s).pole / (1j * np.pi)
    return -eta_regularized(dens, x0, s, eta).pole / (1j * np.pi)


def class_coefficients(model: RadRecModel, p: Optional[int] = None,
                       eta: Optional[float] = None) -> List[ClassEntry]:
    """All four classes in fixed order."""
    return [lowest_order_coefficient(model, p), se_bound_coefficient(model, p),
            vertex_coefficient(model, p), se_free_coefficient(model, p, eta)]


def assemble_cross_section(entries, model: RadRecModel, dk: Optional[float] = None,
                           tol: float = 1e-12) -> float:
    """``dsigma = (2 pi)^3 / v_i * sum(C) * dk``; dk defaults to the photon weight at omega*."""
    if not model.v_i > 0:
        raise InvalidModel("v_i must be positive")
    total = sum(e.coefficient for e in entries)
    if total < -tol:
        warnings.warn(f"total coefficient {total:.3e} is negative", NonPhysicalCrossSection)
    if dk is None:
        dk = model.photons.weight_at(model.omega_star)
    return (2 * np.pi) ** 3 / model.v_i * total * dk


def extract_amplitude(model: RadRecModel, p: Optional[int] = None,
                      eta: Optional[float] = None) -> Dict[int, Amplitude]:
    """Approximate amplitude per final channel q, to first order in Sigma and Lambda.

    The Sigma-derivative term carries 1/2 (it appears once in the cross
    section); the photon-coupling derivative carries 1 (it appears twice).
    """
    p, w, targets, pq = _kinematics(model, p)
    s = model.spectrum
    A = model.photons.coupling
    aw, da = A(w), A.d(w)
    e_a = model.eps_a
    sig_a, dsig_a = model.sigma(e_a), model.sigma.d(e_a)
    x0 = s.states[p].energy
    sig_p = model.sigma(x0)
    lam = model.lambda_vx(x0)
    gq = _target_resolvent(model, targets)
    out = {}
    for q in targets:
        c = aw[q, :] * sig_p[:, p]
        free = -1j * np.pi * _density_at(model, c, x0, eta) if np.any(c[s.continuum_ids]) else 0j
        out[q] = Amplitude(q, [
            AmplitudeTerm("A", Fraction(1), complex(aw[q, p])),
            AmplitudeTerm("Sigma G_Q A", Fraction(1), complex((sig_a @ gq @ aw)[q, p])),
            AmplitudeTerm("Sigma q dA/dE", Fraction(1), complex((sig_a @ pq @ da)[q, p])),
            AmplitudeTerm("dSigma/dE q A", Fraction(1, 2), complex((dsig_a @ pq @ aw)[q, p])),
            AmplitudeTerm("Lambda", Fraction(model.vertex_sign), complex(lam[q, p])),
            AmplitudeTerm("A G_pole Sigma", Fraction(1), complex(free)),
        ])
    return out
