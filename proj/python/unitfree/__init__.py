"""Unit-free Hamiltonian mechanics: Jacobi structures on coordinate charts."""

from ._core import (
    ChartMismatch,
    ConfigError,
    EvalError,
    Expr,
    PointOffSurface,
    StepFailure,
    SyntaxError,
    System,
    UnitfreeError,
    bracket,
    coisotropy,
    contact_system,
    flow,
    hamiltonian_vector_field,
    integrability,
    load_system,
    nondegeneracy,
    parse,
    parse_system,
    product,
    symbol_squiggle,
)

__all__ = [
    "ChartMismatch",
    "ConfigError",
    "EvalError",
    "Expr",
    "PointOffSurface",
    "StepFailure",
    "SyntaxError",
    "System",
    "UnitfreeError",
    "bracket",
    "coisotropy",
    "contact_system",
    "flow",
    "hamiltonian_vector_field",
    "integrability",
    "load_system",
    "nondegeneracy",
    "parse",
    "parse_system",
    "product",
    "symbol_squiggle",
]
