"""Certified two-sided bounds on strict s-numbers of l1 -> linf matrices.

Subpackages and modules:

* ``numerics``  exact/float scalars, the simplex solver and polytope kernel
* ``spaces``    weighted l1 and linf spaces, subspaces, quotient distances
* ``operators`` operator matrices, summation/Volterra discretisations, norms
* ``witnesses`` factorizations, approximants, subspaces and pigeonhole certificates
* ``snumbers``  interval engines for the six kinds and the axiom checks
* ``cli``       the ``sncert`` command
"""
__version__ = "0.1.0"

from .numerics import BACKEND, Mode  # noqa: E402
from .operators import OperatorMatrix, op_norm, summation_matrix, volterra_matrix  # noqa: E402

__all__ = ["__version__", "BACKEND", "Mode", "OperatorMatrix", "op_norm", "summation_matrix",
           "volterra_matrix"]
