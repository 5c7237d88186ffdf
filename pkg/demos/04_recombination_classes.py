"""Radiative recombination coefficients for the reference fixture.

Three bound levels plus a 61-point continuum, complex Hermitian couplings,
Sigma linear in energy and Lambda constant.  Each diagram class gives one
real coefficient; the cross section is their sum times (2 pi)^3 dk / v_i.
"""
from radrec.fixtures import reference_model
from radrec.io import run_pipeline

model = reference_model()
report = run_pipeline(model)

print(f"omega* = {report.omega_star:.6f}, dk = {report.dk:.4f}, v_i = {report.v_i}")
for e in report.entries:
    print(f"{e.label:9s} C = {e.coefficient: .6e}   dsigma = {report.class_cross_section(e): .6e}")
    for name, value in e.terms.items():
        print(f"    {name:24s} {value.real: .4e} {value.imag:+.1e}j")
print(f"total dsigma {report.cross_section:.6f}")

# the photon weight is the only grid dependence of the coefficients
fine = run_pipeline(reference_model(n_photons=81))
print(f"lowest order on 41 vs 81 photon points: {report.entry('lowest').coefficient:.12f}"
      f" {fine.entry('lowest').coefficient:.12f}")
