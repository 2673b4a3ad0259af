"""Time-dependent ROC/AUC and calibration of risk scores under competing risks.

Scores are probabilities of the cause of interest by ``tau`` unless
``raw_marker=True`` (then only discrimination metrics are computed).
Status coding: 0 censored, 1..K cause of failure.
"""

from ._cracc import (
    Error,
    bootstrap,
    case_weights,
    evaluate,
    generate,
    roc,
    true_values,
)

__all__ = [
    "Error",
    "bootstrap",
    "case_weights",
    "evaluate",
    "generate",
    "roc",
    "true_values",
]
__version__ = "0.1.0"
