"""Resolvents, principal-value/half-pole integration and the Lorentzian delta."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (InsufficientGrid, InvalidParameter, PoleOutsideGrid, QuasiDegenerate,
                     SingularResolvent)
from .spectral import ModelSpace, Spectrum, _frozen


def default_eta(spectrum: Spectrum) -> float:
    """1e-6 times the largest gap between neighbouring levels."""
    e = np.unique(spectrum.energies)
    gap = np.max(np.diff(e)) if e.size > 1 else 1.0
    return 1e-6 * gap


def resolvent(spectrum: Spectrum, energy: float, eta: float = 0.0,
              degeneracy_tol: float = 1e-9) -> np.ndarray:
    """Diagonal 1/(E - eps_n + i eta)."""
    if eta < 0:
        raise InvalidParameter("eta must be nonnegative")
    if eta == 0:
        bad = spectrum.degenerate_with(energy, degeneracy_tol)
        if bad:
            raise SingularResolvent(bad, energy)
    return _frozen(np.diag(1.0 / (energy - spectrum.energies + 1j * eta)))


def reduced_resolvent(spectrum: Spectrum, model: ModelSpace, energy: float) -> np.ndarray:
    """Q/(E - H0): zero on the model space, 1/(E - eps_n) elsewhere."""
    model.validate(spectrum)
    q = model.q_indices(spectrum)
    bad = spectrum.degenerate_with(energy, model.degeneracy_tol, q)
    if bad:
        raise SingularResolvent(bad, energy)
    d = np.zeros(spectrum.dimension, dtype=complex)
    d[q] = 1.0 / (energy - spectrum.energies[q])
    return _frozen(np.diag(d))


def projected_resolvent(energy: float, e_prime: float, p_prime: np.ndarray) -> np.ndarray:
    """P'/(E - E'); raises QuasiDegenerate at E == E'."""
    if energy == e_prime:
        raise QuasiDegenerate(f"projected resolvent at its pole E = E' = {energy}")
    return _frozen(np.asarray(p_prime, dtype=complex) / (energy - e_prime))


# --- Sokhotski-Plemelj ------------------------------------------------------

@dataclass(frozen=True)
class PlemeljResult:
    principal: complex
    pole: complex

    @property
    def total(self) -> complex:
        return self.principal + self.pole


def _local_cubic(nodes: np.ndarray, values: np.ndarray, x0: float):
    """Value and slope at x0 of the cubic through the four nodes nearest x0."""
    k = int(np.searchsorted(nodes, x0))
    lo = min(max(k - 2, 0), nodes.size - 4)
    xs, ys = nodes[lo:lo + 4], values[lo:lo + 4]
    t = xs - x0
    c = np.linalg.solve(np.vander(t, 4, increasing=True), ys)
    return c[0], c[1]


def _node_slope(nodes: np.ndarray, values: np.ndarray, k: int):
    """Slope at node k from the quartic through the five nodes centred on it (cubic near edges)."""
    if 2 <= k <= nodes.size - 3:
        t = nodes[k - 2:k + 3] - nodes[k]
        return np.linalg.solve(np.vander(t, 5, increasing=True), values[k - 2:k + 3])[1]
    return _local_cubic(nodes, values, nodes[k])[1]


def _nodes_weights(grid) -> tuple:
    """(nodes, weights, (a, b)) from a Spectrum or a (nodes, weights[, (a, b)]) tuple."""
    if isinstance(grid, Spectrum):
        nodes, weights = grid.continuum_nodes, grid.continuum_weights
        interval = grid.continuum_interval
    else:
        nodes, weights = np.asarray(grid[0], dtype=float), np.asarray(grid[1], dtype=float)
        interval = grid[2] if len(grid) > 2 else None
    if interval is None and nodes.size:
        interval = (float(nodes[0]), float(nodes[-1]))
    return nodes, weights, interval


def plemelj_integrate(f: Sequence[complex], x0: float,
                      grid: Union[Spectrum, tuple]) -> PlemeljResult:
    """Limit of ``int f(x)/(x - x0 + i eta) dx`` as eta -> 0+, split in two.

    ``principal`` is ``PV int f(x)/(x - x0) dx`` by pole subtraction,
    ``sum_i w_i (f_i - f0)/(x_i - x0) + f0 ln((b - x0)/(x0 - a))``, and
    ``pole`` is ``-i pi f(x0)``.  ``f0`` comes from the cubic through the four
    nearest nodes; at a node coinciding with x0 the integrand is replaced by
    the centred-stencil slope.  ``[a, b]`` is the rule's interval, which for
    Gauss grids lies beyond the outermost nodes.
    For a resolvent ``1/(x0 - x + i eta)`` negate the principal part only.
    """
    nodes, weights, interval = _nodes_weights(grid)
    f = np.asarray(f, dtype=complex)
    if nodes.size < 4:
        raise InsufficientGrid(f"need at least 4 continuum nodes, got {nodes.size}")
    if f.shape != nodes.shape:
        raise InsufficientGrid(f"f sampled on {f.size} points, grid has {nodes.size}")
    a, b = interval
    if not (a < x0 < b and nodes[0] < x0 < nodes[-1]):
        raise PoleOutsideGrid(f"pole x0={x0} not strictly inside the sampled range ({nodes[0]}, {nodes[-1]})")
    f0, _ = _local_cubic(nodes, f, x0)
    dx = nodes - x0
    hit = np.abs(dx) <= 1e-12 * max(1.0, abs(x0))
    g = np.empty_like(f)
    g[~hit] = (f[~hit] - f0) / dx[~hit]
    for k in np.flatnonzero(hit):
        g[k] = _node_slope(nodes, f, k)
    principal = np.sum(weights * g) + f0 * np.log((b - x0) / (x0 - a))
    return PlemeljResult(complex(principal), complex(-1j * np.pi * f0))


def eta_regularized(f: Sequence[complex], x0: float, grid, eta: float) -> PlemeljResult:
    """Brute-force ``sum w f/(x - x0 + i eta)``, kernel split into PV and pole parts."""
    nodes, weights, _ = _nodes_weights(grid)
    f = np.asarray(f, dtype=complex)
    dx = nodes - x0
    den = dx ** 2 + eta ** 2
    return PlemeljResult(complex(np.sum(weights * f * dx / den)),
                         complex(-1j * eta * np.sum(weights * f / den)))


def delta_gamma(a, gamma: float):
    """Lorentzian regularised delta, (1/pi) gamma/(a^2 + gamma^2)."""
    if not gamma > 0:
        raise InvalidParameter(f"gamma must be positive, got {gamma}")
    a = np.asarray(a, dtype=float)
    out = gamma / (np.pi * (a * a + gamma * gamma))
    return float(out) if out.ndim == 0 else out
