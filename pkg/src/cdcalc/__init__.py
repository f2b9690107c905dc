"""cdcalc: exact total-derivative operator calculus on jet spaces.

Core objects: DiffPoly (exact differential polynomials), JetContext /
JetPoint (coordinate charts and rational sample points), HorizontalForm
(forms in the dx_i), CDiffOp (matrices of total-derivative operators), and
the finite-dimensional machinery built on them: symbols, delta-cohomology,
formal-exactness checks, zero-curvature residuals, and the p-form tables.
"""

from .expr import (
    Coord, DiffPoly, EvaluationError, ParseError,
    evaluate, format_coord, format_poly, parse_coord, parse_expr, partial,
)
from .jet import (
    HorizontalForm, JetContext, JetPoint, PointError, Problem,
    dbar, format_form, generic_points, increasing_tuples, parse_point_file,
    parse_problem, random_point, total_derivative, total_derivative_sigma,
    wedge,
)
from .ops import (
    CDiffOp, ScalarCDiffOp, adjoint, apply_op, compose, dbar_operator,
    format_operator, format_scalar_op, green_remainder, linearize, pairing,
    parse_operator_matrix, parse_scalar_op,
)
from .spencer import (
    FiberMap, InvolutivityResult, SpencerReport, SymbolMatrix, TwoLineResult,
    delta_map, fiber_map, format_symbol_entry, graded_symbol_matrix,
    is_involutive, multiindices, multiindices_upto, spencer_cohomology,
    symbol, symbol_kernel_basis, two_line_polynomial,
)
from .compat import (
    ExactnessReport, KlineReport, OperatorComplex, PositionCheck,
    check_formal_exactness, cokernel_rank, kline_report, parse_complex,
)
from .zcr import (
    MatrixForm, covering_substitute, format_matrix_form, mc_residual,
    parse_matrix_forms,
)
from .pform import (
    E1Table, EpiCheck, Metric, MetricError, e1_table, epi_check, hodge_star,
    star_operator,
)

__version__ = "0.1.0"
