import pytest

from radrec.errors import InvalidTerm
from radrec.terms import (DIAGRAM_CLASSES, DerivativeMark, Interaction, Projector, Resolvent,
                          TermExpression, diagram_terms, enumerate_cuts, ladder, rewrite_msc)

# placements per class: lowest order, bound-state self-energy (upper/lower),
# vertex (upper, and its mirror), free-electron self-energy (plus inverted diagram)
GOLDEN_CUTS = {"lowest": 1, "se_bound": 2, "vertex": 2, "se_free": 2}


def test_golden_cut_counts():
    terms = diagram_terms()
    assert tuple(terms) == DIAGRAM_CLASSES
    for label, expected in GOLDEN_CUTS.items():
        cuts = [c for t in terms[label] for c in enumerate_cuts(t, 0.8)]
        assert len(cuts) == expected, label
        assert all(c.environment == "continuum" for c in cuts)
        assert all(isinstance(c.term.factors[c.cut_index], Resolvent) for c in cuts)


def test_lowest_order_cut():
    (cut,) = enumerate_cuts(ladder("A", "E-w", "A"), 1.5)
    assert cut.cut_index == 1 and cut.on_shell_energy == 1.5
    assert cut.msc_positions == () and cut.pole_positions == ()


def test_bound_self_energy_cuts_leave_msc_partner():
    cuts = enumerate_cuts(ladder("A", "E-w", "Sigma", "E-w", "A"))
    assert [c.cut_index for c in cuts] == [1, 3]
    assert [c.msc_positions for c in cuts] == [(3,), (1,)]


def test_vertex_single_cut():
    assert len(enumerate_cuts(ladder("Lambda", "E-w", "A"))) == 1


def test_free_self_energy_pole_position():
    (cut,) = enumerate_cuts(ladder("A", "E-w", "A", "E", "Sigma"))
    assert cut.cut_index == 1
    assert cut.pole_positions == (3,)


def test_malformed_terms():
    with pytest.raises(InvalidTerm):
        enumerate_cuts(TermExpression((Interaction("A"), Interaction("A"))))
    with pytest.raises(InvalidTerm):
        enumerate_cuts(TermExpression((Interaction("A"), Resolvent("full", "E-w"))))
    with pytest.raises(InvalidTerm):
        TermExpression((Interaction("A", "E+w"),))
    with pytest.raises(InvalidTerm):
        TermExpression((Resolvent("diagonal"),))
    with pytest.raises(InvalidTerm):
        TermExpression((DerivativeMark((0, 3)), Interaction("A")))


def test_rewrite_msc():
    t = ladder("A", "E-w", "Sigma", "E-w", "A")
    r = rewrite_msc(t, 3)
    assert isinstance(r.factors[0], DerivativeMark)
    assert r.factors[0].span == (1, 4)
    assert isinstance(r.factors[4], Projector)
    assert not r.is_ladder()
    assert r.render() == "d/dE A G(E-w) Sigma P A"
    with pytest.raises(InvalidTerm):
        rewrite_msc(t, 2)
    with pytest.raises(InvalidTerm):
        rewrite_msc(TermExpression((Resolvent(), Interaction("A"))), 0)


def test_render():
    assert str(ladder("A", "E-w", "A")) == "A G(E-w) A"
    assert Resolvent("reduced", "E").render() == "G_Q(E)"
