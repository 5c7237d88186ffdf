"""Finite single-particle basis, model-space projectors and operator plumbing.

Units are natural (hbar = c = 1); a photon is carried by its energy ``omega``.

Continuum states are quadrature samples.  Operator matrices are expressed in
the weight-absorbed normalisation: a continuum sample ``n`` stands for
``sqrt(w_n)`` times the energy-normalised state, so plain matrix products
already implement the completeness sum ``sum_n w_n |n><n|``.  Divide a product
of two continuum-indexed elements by ``w_n`` to recover a smooth density.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import DerivativeInconsistent, DomainError, InvalidModel

DEFAULT_DEGENERACY_TOL = 1e-9


class StateKind(str, Enum):
    BOUND = "bound"
    CONTINUUM = "continuum"


@dataclass(frozen=True)
class BasisState:
    id: int
    energy: float
    kind: StateKind
    weight: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if not np.isfinite(self.energy):
            raise InvalidModel(f"state {self.id}: energy must be finite")
        if self.kind is StateKind.CONTINUUM:
            if self.weight is None or not self.weight > 0:
                raise InvalidModel(f"state {self.id}: continuum sample needs a positive weight")
        elif self.weight is not None:
            raise InvalidModel(f"state {self.id}: bound state carries no quadrature weight")


@dataclass(frozen=True)
class Spectrum:
    """Diagonal model Hamiltonian: bound levels followed by continuum samples."""

    states: tuple
    # integration range covered by the continuum samples (differs from the
    # outermost nodes for Gauss rules)
    continuum_interval: Optional[tuple] = None

    def __post_init__(self):
        if len(self.states) == 0:
            raise InvalidModel("spectrum needs at least one state")
        for i, s in enumerate(self.states):
            if s.id != i:
                raise InvalidModel(f"state ids must be contiguous from 0, got {s.id} at {i}")

    @property
    def dimension(self) -> int:
        return len(self.states)

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states], dtype=float)

    @property
    def bound_ids(self) -> list:
        return [s.id for s in self.states if s.kind is StateKind.BOUND]

    @property
    def continuum_ids(self) -> list:
        return [s.id for s in self.states if s.kind is StateKind.CONTINUUM]

    @property
    def continuum_nodes(self) -> np.ndarray:
        return np.array([self.states[i].energy for i in self.continuum_ids])

    @property
    def continuum_weights(self) -> np.ndarray:
        return np.array([self.states[i].weight for i in self.continuum_ids])

    def sqrt_weights(self) -> np.ndarray:
        """Per-state normalisation factor: sqrt(w) on continuum samples, 1 on bound states."""
        return np.array([np.sqrt(s.weight) if s.weight else 1.0 for s in self.states])

    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)

    def degenerate_with(self, energy: float, tol: float = DEFAULT_DEGENERACY_TOL,
                        ids: Optional[Iterable[int]] = None) -> list:
        """Ids whose energy lies within ``tol * max(1, |energy|)`` of ``energy``."""
        pool = range(self.dimension) if ids is None else ids
        scale = tol * max(1.0, abs(energy))
        return [i for i in pool if abs(self.states[i].energy - energy) <= scale]


def _grid(continuum: dict):
    if "nodes" in continuum:
        nodes = np.asarray(continuum["nodes"], dtype=float)
        if nodes.size < 2:
            raise InvalidModel("continuum grid needs at least 2 nodes")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidModel("continuum nodes must be strictly increasing")
        rule = continuum.get("rule", "trapezoid")
        if rule != "trapezoid":
            raise InvalidModel("explicit nodes only support the trapezoid rule")
        w = np.zeros_like(nodes)
        d = np.diff(nodes)
        w[:-1] += d / 2
        w[1:] += d / 2
        return nodes, w, (float(nodes[0]), float(nodes[-1]))

    lo, hi = float(continuum["min"]), float(continuum["max"])
    n = int(continuum["n_points"])
    rule = continuum.get("rule", "trapezoid")
    if n < 2:
        raise InvalidModel("continuum grid needs n_points >= 2")
    if not lo < hi:
        raise InvalidModel(f"continuum grid is not monotone: min={lo} >= max={hi}")
    if rule == "trapezoid":
        nodes = np.linspace(lo, hi, n)
        h = (hi - lo) / (n - 1)
        w = np.full(n, h)
        w[0] = w[-1] = h / 2
    elif rule in ("gauss", "gauss-legendre"):
        x, w = np.polynomial.legendre.leggauss(n)
        nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * w
    else:
        raise InvalidModel(f"unknown quadrature rule {rule!r}")
    return nodes, w, (lo, hi)


def build_spectrum(bound_energies: Sequence[float], continuum: Optional[dict] = None) -> Spectrum:
    """Build the discretised spectrum.

    Parameters
    ----------
    bound_energies : sequence of float
        Discrete levels; they come first in the basis.
    continuum : dict, optional
        ``{"min", "max", "n_points", "rule"}`` with rule ``"trapezoid"``
        (default) or ``"gauss"``, or ``{"nodes": [...]}`` for an explicit
        trapezoid grid.

    Examples
    --------
    >>> s = build_spectrum([-0.5], {"min": 0, "max": 1, "n_points": 3})
    >>> s.dimension, list(s.continuum_weights)
    (4, [0.25, 0.5, 0.25])
    """
    bound_energies = list(bound_energies)
    if not bound_energies and not continuum:
        raise InvalidModel("empty spectrum: no bound energies and no continuum")
    states = []
    for e in bound_energies:
        if not np.isfinite(e):
            raise InvalidModel(f"bound energy {e!r} is not finite")
        states.append(BasisState(len(states), float(e), StateKind.BOUND, None, f"b{len(states)}"))
    interval = None
    if continuum:
        nodes, weights, interval = _grid(continuum)
        for k, (x, w) in enumerate(zip(nodes, weights)):
            states.append(BasisState(len(states), float(x), StateKind.CONTINUUM, float(w), f"c{k}"))
    return Spectrum(tuple(states), interval)


@dataclass(frozen=True)
class ModelSpace:
    p_indices: frozenset
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL

    def __init__(self, p_indices: Iterable[int] = (), degeneracy_tol: float = DEFAULT_DEGENERACY_TOL):
        object.__setattr__(self, "p_indices", frozenset(int(i) for i in p_indices))
        object.__setattr__(self, "degeneracy_tol", float(degeneracy_tol))
        if not self.degeneracy_tol > 0:
            raise InvalidModel("degeneracy_tol must be positive")

    @classmethod
    def degenerate(cls, spectrum: Spectrum, energy: float,
                   degeneracy_tol: float = DEFAULT_DEGENERACY_TOL) -> "ModelSpace":
        """Model space of all states degenerate with ``energy``."""
        return cls(spectrum.degenerate_with(energy, degeneracy_tol), degeneracy_tol)

    def validate(self, spectrum: Spectrum):
        bad = sorted(i for i in self.p_indices if not 0 <= i < spectrum.dimension)
        if bad:
            raise InvalidModel(f"model-space indices {bad} outside 0..{spectrum.dimension - 1}")

    def q_indices(self, spectrum: Spectrum) -> list:
        return [i for i in range(spectrum.dimension) if i not in self.p_indices]

    def block(self, spectrum: Spectrum, energy: float) -> list:
        """The part of P degenerate with ``energy`` (the P_E' of the recursion)."""
        return spectrum.degenerate_with(energy, self.degeneracy_tol, sorted(self.p_indices))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def operator_matrix(entries, hermitian: bool = False) -> np.ndarray:
    """Validate and freeze a dense square complex matrix.

    With ``hermitian=True`` the matrix must satisfy
    ``max|M - M^H| <= 1e-12 max|M|``.
    """
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidModel(f"operator must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidModel("operator has non-finite entries")
    if hermitian:
        scale = np.max(np.abs(m)) if m.size else 0.0
        if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-12 * scale:
            raise InvalidModel("operator flagged hermitian but M != M^H")
    return _frozen(m)


def adjoint(m: np.ndarray) -> np.ndarray:
    return _frozen(np.conj(np.asarray(m)).T.copy())


def projectors(spectrum: Spectrum, model: ModelSpace):
    """Return the (P, Q) projector pair as frozen diagonal matrices."""
    model.validate(spectrum)
    d = np.zeros(spectrum.dimension, dtype=complex)
    d[sorted(model.p_indices)] = 1.0
    return _frozen(np.diag(d)), _frozen(np.diag(1.0 - d))


def block_projector(dimension: int, ids: Iterable[int]) -> np.ndarray:
    d = np.zeros(dimension, dtype=complex)
    d[list(ids)] = 1.0
    return _frozen(np.diag(d))


def matrix_element(op: np.ndarray, bra: int, ket: int) -> complex:
    n = op.shape[0]
    if not (0 <= bra < n and 0 <= ket < n):
        raise IndexError(f"matrix element <{bra}|.|{ket}> outside dimension {n}")
    return complex(op[bra, ket])


# --- energy-dependent operators -------------------------------------------

FD_RELATIVE_STEP = 1e-4


def fd_step(energy: float) -> float:
    return FD_RELATIVE_STEP * max(1.0, abs(energy))


def richardson_derivative(f: Callable[[float], np.ndarray], x: float, h: Optional[float] = None):
    """Central difference with one Richardson level (steps h and h/2)."""
    if h is None:
        h = fd_step(x)

    def central(step):
        return (np.asarray(f(x + step)) - np.asarray(f(x - step))) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def derivative_tolerance(op_norm: float) -> float:
    return max(1e-8, 1e-6 * op_norm)


@dataclass(frozen=True)
class EnergyDependentOperator:
    """Matrix-valued function of an energy parameter.

    ``derivative`` is an optional analytic d/dE; without it a Richardson
    central difference is used.  ``window`` bounds the energies at which
    ``evaluate`` may be called.
    """

    evaluate: Callable[[float], np.ndarray]
    derivative: Optional[Callable[[float], np.ndarray]] = None
    tag: str = ""
    window: tuple = (-np.inf, np.inf)
    constant: bool = field(default=False, compare=False)
    fd_step: Optional[float] = None

    @classmethod
    def constant_op(cls, matrix, tag: str = "") -> "EnergyDependentOperator":
        m = operator_matrix(matrix)
        zero = _frozen(np.zeros_like(m))
        return cls(lambda e: m, lambda e: zero, tag, constant=True)

    @classmethod
    def linear(cls, intercept, slope, tag: str = "", analytic: bool = True) -> "EnergyDependentOperator":
        """``M(E) = intercept + E * slope``."""
        m0 = operator_matrix(intercept)
        m1 = operator_matrix(slope)
        if m0.shape != m1.shape:
            raise InvalidModel("intercept and slope shapes differ")
        return cls(lambda e: m0 + e * m1, (lambda e: m1) if analytic else None, tag)

    def __call__(self, energy: float) -> np.ndarray:
        lo, hi = self.window
        if not lo <= energy <= hi:
            raise DomainError(f"{self.tag or 'operator'} evaluated at E={energy} outside {self.window}")
        return np.asarray(self.evaluate(energy))

    def scaled(self, factor: float) -> "EnergyDependentOperator":
        d = self.derivative
        return EnergyDependentOperator(
            lambda e: factor * np.asarray(self.evaluate(e)),
            (lambda e: factor * np.asarray(d(e))) if d is not None else None,
            self.tag, self.window, self.constant, self.fd_step)

    def numeric_derivative(self, energy: float, h: Optional[float] = None) -> np.ndarray:
        if h is None:
            h = self.fd_step if self.fd_step is not None else fd_step(energy)
        lo, hi = self.window
        if energy - h < lo or energy + h > hi:
            raise DomainError(
                f"{self.tag or 'operator'}: FD stencil [{energy - h}, {energy + h}] leaves window {self.window}")
        return richardson_derivative(self.evaluate, energy, h)

    def d(self, energy: float) -> np.ndarray:
        """d/dE at ``energy``: analytic when available, Richardson FD otherwise."""
        if self.derivative is not None:
            return np.asarray(self.derivative(energy))
        return self.numeric_derivative(energy)

    def check_derivative(self, energy: float) -> float:
        """Compare analytic and FD derivatives; return the deviation or raise."""
        if self.derivative is None:
            return 0.0
        analytic = np.asarray(self.derivative(energy))
        numeric = self.numeric_derivative(energy)
        dev = float(np.max(np.abs(analytic - numeric), initial=0.0))
        tol = derivative_tolerance(float(np.max(np.abs(self(energy)), initial=0.0)))
        if dev > tol:
            raise DerivativeInconsistent(
                f"{self.tag or 'operator'}: analytic derivative deviates from FD by {dev:.3e} "
                f"(tolerance {tol:.1e}) at E={energy}", dev, tol)
        return dev
