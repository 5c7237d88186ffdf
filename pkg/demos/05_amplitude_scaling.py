"""Amplitude extraction and the eps^2 consistency check.

The first-order amplitude tau = tau0 + dtau carries a factor one half on
the dSigma/dE term and one on the dA/dE term.  The class coefficients
keep |tau0|^2 + 2 Re(tau0* dtau), so the mismatch with |tau|^2 is |dtau|^2
and falls off as eps^2 when Sigma and Lambda are scaled by eps.
"""
from radrec.fixtures import reference_model
from radrec.recombination import extract_amplitude
from radrec.verify import amplitude_residual, perturbative_consistency

model = reference_model()
amp = extract_amplitude(model)[0]
for t in amp.terms:
    print(f"{t.name:16s} factor {str(t.factor):5s} contribution {t.contribution:.4e}")

for eps in (1e-1, 1e-2, 1e-3):
    print(f"eps={eps:6.0e}  | |tau|^2 - sum C | = {amplitude_residual(model.scaled(eps)):.3e}")

r = perturbative_consistency(model, [1e-1, 1e-2, 1e-3])
print(f"fitted slope {r.context['slope']:.4f}")
print(r.line())
