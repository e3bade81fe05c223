"""Left-invariant complex Finsler metrics on Lie groups: connection, curvature, classification."""

__version__ = "0.1.0"

from .algebra import (  # noqa: E402
    ComplexifiedAlgebra,
    RealLieAlgebra,
    complexify,
    decomplexify,
    is_complex_group_type,
    nijenhuis,
    validate_complex,
    validate_real,
)
from .classify import (  # noqa: E402
    ClassificationReport,
    ClassifyConfig,
    TheoremReport,
    berwald_residual,
    classify,
    kahler_residual,
    verify_complex_group_theorems,
    weakly_kahler_residual,
)
from .connection import ConnectionData, connection_data  # noqa: E402
from .curvature import (  # noqa: E402
    CurvatureData,
    bisectional,
    curvature_block,
    curvature_operator,
    curvature_operator_free,
    holomorphic_sectional,
)
from .norm import DUAL, FD, DiffConfig, MetricJet, metric_jet  # noqa: E402

__all__ = [name for name in dir() if not name.startswith("_")]
