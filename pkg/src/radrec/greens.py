"""Ladder evolution operators, the Green's-operator recursion and model-space contributions.

Everything lives in the energy domain: a ladder ``Gamma V Gamma V ... P_E``
is evaluated at the energy ``E`` of the model-space block it acts on, and
the time derivative that turns a Green's operator into an effective
interaction amounts to dropping the leftmost resolvent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (ExtrapolationFailed, InvalidInput, InvalidParameter, ResidualSingularity,
                     SingularResolvent)
from .singularity import reduced_resolvent, resolvent
from .spectral import (EnergyDependentOperator, ModelSpace, Spectrum, block_projector,
                       projectors)

Operator = Union[np.ndarray, EnergyDependentOperator]


def _at(op: Operator, energy: float) -> np.ndarray:
    if isinstance(op, EnergyDependentOperator):
        return op(energy)
    return np.asarray(op)


@dataclass(frozen=True)
class UEvaluator:
    """U^(n)(E) P_E for one perturbative order."""

    order: int
    eval: Callable[[float], np.ndarray]

    def __call__(self, energy: float) -> np.ndarray:
        return np.asarray(self.eval(energy))


def evaluate_ladder(spectrum: Spectrum, model: ModelSpace, V: Operator, energy: float, n: int,
                    resolvent_kind: str = "full", eta: float = 0.0) -> np.ndarray:
    """``Gamma V Gamma V ... Gamma V`` with ``n`` interactions, all at ``energy``.

    ``resolvent_kind`` is ``"full"`` (optionally with ``eta``) or ``"reduced"``
    for ``Q/(E - H0)``.
    """
    if n < 1:
        raise InvalidInput("ladder order must be >= 1")
    try:
        if resolvent_kind == "full":
            g = resolvent(spectrum, energy, eta, model.degeneracy_tol)
        elif resolvent_kind == "reduced":
            g = reduced_resolvent(spectrum, model, energy)
        else:
            raise InvalidInput(f"unknown resolvent kind {resolvent_kind!r}")
    except SingularResolvent as exc:
        raise SingularResolvent(exc.ids, energy, position=n) from None
    gv = g @ _at(V, energy)
    out = gv
    for _ in range(n - 1):
        out = out @ gv
    return out


def ladder_evaluator(spectrum: Spectrum, model: ModelSpace, V: Operator, order: int) -> UEvaluator:
    """U^(order)(E) P_E whose resolvents skip the model block degenerate with E.

    Intermediate states belonging to other model-space blocks stay in and
    give the quasi-singular 1/(E - E') factors the counterterms remove.
    Order 0 is the identity, returned as ``P_E``.
    """
    if order < 0:
        raise InvalidInput("ladder order must be >= 0")
    if order == 0:
        return UEvaluator(0, lambda energy: block_projector(spectrum.dimension,
                                                            model.block(spectrum, energy)))

    def ev(energy):
        own = ModelSpace(model.block(spectrum, energy), model.degeneracy_tol)
        u = evaluate_ladder(spectrum, own, V, energy, order, "reduced")
        return u @ block_projector(spectrum.dimension, own.p_indices)
    return UEvaluator(order, ev)


def greens_order_n(U: Union[Sequence[UEvaluator], Mapping[int, UEvaluator]], n: int, energy: float,
                   spectrum: Spectrum, model: ModelSpace, e_primes: Iterable[float],
                   counterterms: bool = True) -> np.ndarray:
    """G^(n)(E) from the counterterm recursion.

    ``G^(m)(E) = U^(m)(E) - sum_k sum_E' G^(m-k)(E') P_E' U^(k)(E)`` for
    k = 1 .. m-1, with lower orders re-evaluated at every intermediate
    model-space energy E' (cached for the duration of the call).  Setting
    ``counterterms=False`` returns the bare U^(n)(E), for diagnostics.
    """
    if isinstance(U, Mapping):
        table = dict(U)
    else:
        table = {u.order: u for u in U}
    missing = [k for k in range(1, n + 1) if k not in table]
    if missing:
        raise InvalidInput(f"missing U evaluators for orders {missing}")
    e_primes = list(e_primes)
    blocks = {ep: block_projector(spectrum.dimension, model.block(spectrum, ep)) for ep in e_primes}
    cache: Dict[tuple, np.ndarray] = {}
    tol = model.degeneracy_tol

    def u(k, e):
        key = ("U", k, e)
        if key not in cache:
            cache[key] = table[k](e)
        return cache[key]

    def g(m, e):
        key = ("G", m, e)
        if key in cache:
            return cache[key]
        out = np.array(u(m, e), dtype=complex)
        if counterterms:
            for k in range(1, m):
                for ep in e_primes:
                    if abs(ep - e) <= tol * max(1.0, abs(e)):
                        continue
                    out = out - g(m - k, ep) @ blocks[ep] @ u(k, e)
        if not np.all(np.isfinite(out)):
            raise ResidualSingularity(f"G^({m})({e}) not finite after counterterms", position=m)
        cache[key] = out
        return out

    return g(n, energy)


def counterterm_sum(U, n, energy, spectrum, model, e_primes) -> np.ndarray:
    """U^(n)(E) - G^(n)(E): the total subtracted by the recursion."""
    return (greens_order_n(U, n, energy, spectrum, model, e_primes, counterterms=False)
            - greens_order_n(U, n, energy, spectrum, model, e_primes))


def msc_contribution(U2: EnergyDependentOperator, W1, energy: float, p_prime,
                     check: bool = True) -> np.ndarray:
    """Model-space contribution ``(dU2/dE)|_E P' W1``.

    The analytic derivative is used when ``U2`` carries one (and, with
    ``check``, cross-checked against Richardson FD); otherwise FD is used.
    """
    if check:
        U2.check_derivative(energy)
    d = np.atleast_2d(U2.d(energy))
    return d @ np.atleast_2d(p_prime) @ np.atleast_2d(W1)


def greens_two_factor(U2: EnergyDependentOperator, W1, energy: float, spectrum: Spectrum,
                      model: ModelSpace) -> np.ndarray:
    """``U2(E) Gamma_Q(E) W1 + (dU2/dE) P W1``; the MSC replaces the singular P part."""
    p, _ = projectors(spectrum, model)
    gq = reduced_resolvent(spectrum, model, energy)
    W1 = np.asarray(W1)
    return U2(energy) @ gq @ W1 + msc_contribution(U2, W1, energy, p)


def effective_interaction(W2: EnergyDependentOperator, W1, energy: float, spectrum: Spectrum,
                          model: ModelSpace) -> np.ndarray:
    """Second-order effective interaction restricted to P, MSC included."""
    p, _ = projectors(spectrum, model)
    gq = reduced_resolvent(spectrum, model, energy)
    W1 = np.asarray(W1)
    return p @ W2(energy) @ gq @ W1 @ p + p @ msc_contribution(W2, W1, energy, p) @ p


def effective_hamiltonian(W, spectrum: Spectrum, model: ModelSpace) -> np.ndarray:
    """``P H0 P + W``; W must live on the P block."""
    p, q = projectors(spectrum, model)
    W = np.asarray(W, dtype=complex)
    outside = W - p @ W @ p
    if np.max(np.abs(outside), initial=0.0) > 0:
        raise InvalidInput("effective interaction has support outside the model space")
    return p @ spectrum.hamiltonian() @ p + W


# --- Sucher formula ---------------------------------------------------------

def damped_time_ordered(omegas: Sequence[float], gamma: float) -> complex:
    """``int_{t1>...>tn} prod_j exp(i w_j t_j - gamma |t_j|) dt`` in closed form.

    Split by how many times are positive; each chain integrates to a product
    of inverse partial sums of the exponents.
    """
    n = len(omegas)
    alpha = 1j * np.asarray(omegas, dtype=float) - gamma
    beta = 1j * np.asarray(omegas, dtype=float) + gamma
    total = 0j
    for k in range(n + 1):
        pos = 1.0 + 0j
        acc = 0j
        for j in range(k):
            acc += alpha[j]
            pos *= -1.0 / acc
        neg = 1.0 + 0j
        acc = 0j
        for j in range(n - 1, k - 1, -1):
            acc += beta[j]
            neg *= 1.0 / acc
        total += pos * neg
    return total


def s_matrix_diagonal(spectrum: Spectrum, V, state: int, order: int, gamma: float) -> complex:
    """<state| S^(order) |state> of the adiabatically damped expansion."""
    V = np.asarray(V, dtype=complex)
    e = spectrum.energies
    dim = spectrum.dimension
    total = 0j
    for path in itertools.product(range(dim), repeat=order - 1):
        chain = (state,) + path + (state,)
        amp = 1.0 + 0j
        for i in range(order):
            amp *= V[chain[i], chain[i + 1]]
            if amp == 0:
                break
        if amp == 0:
            continue
        omegas = [e[chain[i]] - e[chain[i + 1]] for i in range(order)]
        total += amp * damped_time_ordered(omegas, gamma)
    return (-1j) ** order * total


def sucher_shift(spectrum: Spectrum, V, state: int, gamma: float, max_order: int) -> complex:
    """Damped energy shift ``(i gamma/2) sum n S_n / sum S_n``, truncated order by order."""
    s = [1.0 + 0j] + [s_matrix_diagonal(spectrum, V, state, n, gamma) for n in range(1, max_order + 1)]
    q = [0j] * (max_order + 1)
    for n in range(1, max_order + 1):
        q[n] = n * s[n] - sum(q[k] * s[n - k] for k in range(1, n))
    return 0.5j * gamma * sum(q[1:])


def sucher_energy(spectrum: Spectrum, model: ModelSpace, V, gammas: Sequence[float],
                  max_order: int = 2, fit_tol: float = 1e-6) -> float:
    """Energy shift of the single model state, extrapolated to gamma -> 0.

    A quadratic in gamma is fitted to Re dE(gamma); its intercept is returned.
    """
    model.validate(spectrum)
    if len(model.p_indices) != 1:
        raise InvalidInput("Sucher energy needs a one-dimensional model space")
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size < 4:
        raise InvalidParameter("need at least 4 gamma values for the quadratic fit")
    if np.any(gammas <= 0) or np.any(np.diff(gammas) >= 0):
        raise InvalidParameter("gamma values must be positive and strictly decreasing")
    if max_order < 2:
        raise InvalidParameter("max_order must be >= 2")
    (state,) = model.p_indices
    values = np.array([sucher_shift(spectrum, V, state, g, max_order).real for g in gammas])
    coeffs = np.polyfit(gammas, values, 2)
    resid = np.max(np.abs(np.polyval(coeffs, gammas) - values))
    if resid > fit_tol * max(1.0, abs(coeffs[-1])):
        raise ExtrapolationFailed(f"quadratic gamma fit residual {resid:.2e} above {fit_tol:.0e}")
    return float(coeffs[-1])
