"""Cutting the four diagram classes.

Every diagram is written as a ladder of interactions and resolvents.  A
cut puts one photon-carrying intermediate state on shell.  The photon
resolvents left over on the same term sit in a discrete environment and
turn into model-space contributions (energy derivatives); electron-only
resolvents keep a continuum pole.
"""
from radrec.terms import diagram_terms, enumerate_cuts, rewrite_msc

for label, terms in diagram_terms().items():
    print(f"[{label}]")
    for term in terms:
        print(f"  {term}")
        for cut in enumerate_cuts(term, on_shell_energy=0.8):
            print(f"    cut at factor {cut.cut_index}: msc {cut.msc_positions} pole {cut.pole_positions}")
            for pos in cut.msc_positions:
                print(f"      -> {rewrite_msc(term, pos)}")
