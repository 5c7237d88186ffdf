"""Symbolic diagram terms and the cut rules that rewrite them.

A term is the ordered operator product between ``<p|`` and ``|p>`` of a
forward-scattering diagram, e.g. ``A Gamma(E-w) Sigma Gamma(E-w) A``.  The
energy argument of a resolvent says whether a photon is in flight
(``"E-w"``) or the electron propagates alone (``"E"``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .errors import InvalidTerm

ENERGY_ARGS = ("E", "E'", "E-w")
RESOLVENT_KINDS = ("full", "reduced", "projected")


@dataclass(frozen=True)
class Interaction:
    op: str
    energy_arg: str = "E"

    def render(self):
        return self.op


@dataclass(frozen=True)
class Resolvent:
    kind: str = "full"
    energy_arg: str = "E"

    @property
    def photon_in_flight(self) -> bool:
        return "w" in self.energy_arg

    def render(self):
        sym = {"full": "G", "reduced": "G_Q", "projected": "G_P"}[self.kind]
        return f"{sym}({self.energy_arg})"


@dataclass(frozen=True)
class Projector:
    """Model-space block projector |q><q| left behind by a cut or an MSC rewrite."""

    name: str = "P"

    def render(self):
        return self.name


@dataclass(frozen=True)
class DerivativeMark:
    """d/dE acting on the factors in ``span`` (half-open index range)."""

    span: Tuple[int, int]

    def render(self):
        return "d/dE"


Factor = Union[Interaction, Resolvent, Projector, DerivativeMark]


@dataclass(frozen=True)
class TermExpression:
    factors: tuple
    model_energy: str = "E"
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if isinstance(f, (Interaction, Resolvent)) and f.energy_arg not in ENERGY_ARGS:
                raise InvalidTerm(f"energy argument {f.energy_arg!r} not in {ENERGY_ARGS}")
            if isinstance(f, Resolvent) and f.kind not in RESOLVENT_KINDS:
                raise InvalidTerm(f"unknown resolvent kind {f.kind!r}")
            if isinstance(f, DerivativeMark):
                lo, hi = f.span
                if not 0 <= lo < hi <= len(self.factors):
                    raise InvalidTerm(f"derivative span {f.span} outside the term")

    def is_ladder(self) -> bool:
        """Interaction and resolvent factors alternate, starting and ending on interactions."""
        fs = self.factors
        if not fs or len(fs) % 2 == 0:
            return False
        for i, f in enumerate(fs):
            want = Interaction if i % 2 == 0 else Resolvent
            if not isinstance(f, want):
                return False
        return True

    def resolvent_positions(self):
        return [i for i, f in enumerate(self.factors) if isinstance(f, Resolvent)]

    def render(self) -> str:
        return " ".join(f.render() for f in self.factors)

    def __str__(self):
        return self.render()


def ladder(*names_and_args, label="") -> TermExpression:
    """Build a ladder term from alternating tokens, e.g. ``ladder("A", "E-w", "A")``.

    Odd positions give the energy argument of a full resolvent.
    """
    factors = []
    for i, tok in enumerate(names_and_args):
        factors.append(Interaction(tok) if i % 2 == 0 else Resolvent("full", tok))
    return TermExpression(tuple(factors), label=label)


# Diagram classes of radiative recombination through first order.
DIAGRAM_CLASSES = ("lowest", "se_bound", "vertex", "se_free")


def diagram_terms() -> dict:
    return {
        "lowest": [ladder("A", "E-w", "A", label="lowest order")],
        "se_bound": [ladder("A", "E-w", "Sigma", "E-w", "A", label="self-energy on bound state")],
        "vertex": [ladder("Lambda", "E-w", "A", label="vertex, upper"),
                   ladder("A", "E-w", "Lambda", label="vertex, lower")],
        "se_free": [ladder("A", "E-w", "A", "E", "Sigma", label="self-energy on incoming free electron"),
                    ladder("Sigma", "E", "A", "E-w", "A", label="self-energy on outgoing free electron")],
    }


@dataclass(frozen=True)
class CutPlacement:
    """One cut through a term.

    ``environment`` is ``"continuum"`` when the cut state contains a photon
    of free energy (principal value plus half pole) and ``"discrete"`` when
    the photon energy is already fixed (model-space contribution).
    ``msc_positions`` lists the remaining photon resolvents of the same term,
    which after the cut sit in a discrete environment; ``pole_positions``
    lists electron-only resolvents that cross the continuum.
    """

    term: TermExpression
    cut_index: int
    on_shell_energy: Optional[float]
    environment: str
    msc_positions: tuple = field(default=())
    pole_positions: tuple = field(default=())


def enumerate_cuts(term: TermExpression, on_shell_energy: Optional[float] = None) -> list:
    """All single cuts whose cut state can be a final (bound electron + photon) state."""
    if not term.is_ladder():
        raise InvalidTerm(f"term is not in ladder form: {term}")
    res = term.resolvent_positions()
    photon = [i for i in res if term.factors[i].photon_in_flight]
    electron = tuple(i for i in res if not term.factors[i].photon_in_flight)
    cuts = []
    for i in photon:
        others = tuple(j for j in photon if j != i)
        cuts.append(CutPlacement(term, i, on_shell_energy, "continuum", others, electron))
    return cuts


def rewrite_msc(term: TermExpression, position: int) -> TermExpression:
    """Replace the projected resolvent at ``position`` by its model-space contribution.

    ``U2 Gamma_P W1`` becomes ``d/dE[U2] P W1``; U2 is everything left of
    ``position``.
    """
    if not isinstance(term.factors[position], Resolvent):
        raise InvalidTerm(f"factor {position} of {term} is not a resolvent")
    if position == 0:
        raise InvalidTerm("no factors left of the resolvent to differentiate")
    head = term.factors[:position]
    tail = term.factors[position + 1:]
    factors = (DerivativeMark((1, 1 + len(head))),) + head + (Projector(),) + tail
    return TermExpression(factors, term.model_energy, term.label + " [MSC]")
