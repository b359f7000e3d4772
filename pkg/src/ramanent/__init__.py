"""Conditioned number-state entanglement of two Raman-scattering atomic
ensembles: Fock-state construction, partial-transpose moment tests under
detector noise and readout loss, and quadrature-variance checks."""

__version__ = "0.1.0"
