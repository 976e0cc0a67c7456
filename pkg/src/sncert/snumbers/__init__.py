"""Certified-interval engines for the six strict s-numbers."""
from .engine import (Report, Solver, approximation_number, bernstein_number, gelfand_number,
                     isomorphism_number, kolmogorov_number, mityagin_number, report, solver_for)
from .types import (KIND_ORDER, Certificate, CertifiedInterval, InconsistencyError, SearchBudget,
                    SNumberKind)

__all__ = ["Report", "Solver", "approximation_number", "bernstein_number", "gelfand_number",
           "isomorphism_number", "kolmogorov_number", "mityagin_number", "report", "solver_for",
           "KIND_ORDER", "Certificate", "CertifiedInterval", "InconsistencyError", "SearchBudget",
           "SNumberKind"]
