"""q-series evaluation and identity verification.

Numeric evaluation runs on gmpy2 at a chosen binary precision with rigorous
truncation bounds; the formal backend checks identities coefficientwise with
exact rational arithmetic.
"""

__version__ = "0.1.0"

from .catalog import (  # noqa: E402
    REGISTRY,
    IdentityId,
    IdentityReport,
    SamplerConfig,
    check,
    domain_check,
    eval_side,
    sample_params,
    scan,
    statement,
)
from .errors import (  # noqa: E402
    BranchPointError,
    BudgetError,
    DomainError,
    InsufficientDataError,
    NotInvertibleError,
    PoleError,
    PrecisionContractError,
    PrecisionError,
    QBilatError,
)
from .formal import LaurentSeries, RationalParams, formal_check  # noqa: E402
from .limits import LimitTable, limit_report  # noqa: E402
from .numeric import Approx, PrecisionContext  # noqa: E402
from .qseries import QBase, psi_bilateral, q_gamma, qpoch_inf, theta_product, theta_series  # noqa: E402
from .values import RationalComplex  # noqa: E402

__all__ = [
    "__version__",
    "Approx",
    "BranchPointError",
    "BudgetError",
    "DomainError",
    "IdentityId",
    "IdentityReport",
    "InsufficientDataError",
    "LaurentSeries",
    "LimitTable",
    "NotInvertibleError",
    "PoleError",
    "PrecisionContext",
    "PrecisionContractError",
    "PrecisionError",
    "QBase",
    "QBilatError",
    "REGISTRY",
    "RationalComplex",
    "RationalParams",
    "SamplerConfig",
    "check",
    "domain_check",
    "eval_side",
    "formal_check",
    "limit_report",
    "psi_bilateral",
    "q_gamma",
    "qpoch_inf",
    "sample_params",
    "scan",
    "statement",
    "theta_product",
    "theta_series",
]
