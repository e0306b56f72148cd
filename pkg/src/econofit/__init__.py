"""Income-distribution fitting with statistical-mechanics models."""

from .data_model import (
    BinnedIncomeTable,
    DecileSeries,
    MacroSeries,
    parse_binned_csv,
    parse_decile_csv,
    parse_macro_csv,
)
from .estimators import (
    DecilePointTransformer,
    FermiDiracRegressor,
    LogisticCDFRegressor,
    PolynomialRegressor,
)
from .fitting import FitConfig, FitResult, fit, fit_nls, fit_polynomial
from .macro import batch_fit, build_report, param_time_series
from .transforms import (
    build_ccdf_points,
    build_cdf_points,
    build_growth_points,
    build_pdf_points,
    compute_gini,
    log_scale,
)

__version__ = "0.1.0"

__all__ = [
    "BinnedIncomeTable",
    "DecileSeries",
    "MacroSeries",
    "parse_binned_csv",
    "parse_decile_csv",
    "parse_macro_csv",
    "DecilePointTransformer",
    "FermiDiracRegressor",
    "LogisticCDFRegressor",
    "PolynomialRegressor",
    "FitConfig",
    "FitResult",
    "fit",
    "fit_nls",
    "fit_polynomial",
    "batch_fit",
    "build_report",
    "param_time_series",
    "build_ccdf_points",
    "build_cdf_points",
    "build_growth_points",
    "build_pdf_points",
    "compute_gini",
    "log_scale",
]
