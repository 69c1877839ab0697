"""Symmetries and exact spectra of planar Pauli Hamiltonians for neutral spin-1/2 particles.

The command line front end is ``python -m pauliplane`` (see pauliplane.cli).

Modules:
spinor -- spinor values, Pauli matrices and closed-form spinor functions.
catalog -- the catalogued magnetic fields and their symmetry operators.
determining -- first order operators and the determining equations of [H, Q] = 0.
hamiltonian -- Pauli Hamiltonians, their action and finite difference forms.
algebra -- operator identities checked on analytic probe spinors.
specfun -- Bessel, Kummer, Whittaker and Gamma functions with error estimates.
models -- the exactly solvable periodic, radial and shape invariant models.
task -- the check tree recording every verification call.
"""

import logging

logging.basicConfig(level=logging.WARNING, format='%(levelname)s - %(name)s  - Line:%(lineno)d - %(message)s')
