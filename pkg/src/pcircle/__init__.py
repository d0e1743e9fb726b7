"""Lattice points in p-circles, generalized Bessel functions and
Erdelyi-Kober operators."""

from .errors import (DomainError, EvaluationError, InsufficientDataError,
                     InvariantViolation, NonConvergenceError, PathRefusedError,
                     PCircleError, QuadratureError)
from .numkernel import DiffSpec, QuadratureSpec, SeriesControl
from .pgeom import (DistortedPolar, LatticePoint, PExponent, Shell,
                    count_lattice_points, enumerate_shells, error_term_direct,
                    p_norm, shell_census)
from .genbessel import (EvalPath, GenBesselParams, gen_bessel_integral,
                        gen_bessel_series, phi_coefficient, script_j,
                        truncation_bound)
from .erdkober import EKParams, ek_derivative, ek_integral, multivar_ek
from .hardy import (HardySumConfig, PartialSumTrace, convergence_trace,
                    decay_slope_estimate, hardy_partial_sum)

__version__ = "0.1.0"
