"""Numerics for basic hypergeometric series and q-Borel-Laplace resummation of 2psi1."""

from .connection import (
    Coefficient,
    ConnectionCoefficientSpec,
    SlaterParams,
    connection_coefficient,
    corollary_2psi2_rhs,
    main_theorem_rhs,
    ramanujan_product,
    ramanujan_theta_form,
    slater_rhs,
    v_solution,
    watson_rhs,
    y_infinity,
)
from .errors import (
    ConfigError,
    DomainError,
    MaxTermsExceeded,
    QSeriesError,
)
from .qcore import (
    QContext,
    SeriesKind,
    SeriesSpec,
    TruncatedValue,
    phi_series,
    psi_series,
    qpochhammer,
    qpochhammer_inf,
    qpochhammer_multi,
    theta,
)
from .resummation import (
    BilateralCoefficients,
    Psi1Params,
    SpiralSpec,
    borel_image_2psi2,
    psi2x1_coefficients,
    q_borel_plus,
    q_laplace_plus,
    resum_2psi1,
    roundtrip_check,
)
from .verify import (
    Identity,
    QDifferenceEquation,
    SweepConfig,
    SweepReport,
    heine_equation,
    psi2x1_equation,
    qde_residual,
    read_report,
    run_sweep,
    write_report,
)

__all__ = [
    "BilateralCoefficients",
    "Coefficient",
    "ConfigError",
    "ConnectionCoefficientSpec",
    "DomainError",
    "Identity",
    "MaxTermsExceeded",
    "Psi1Params",
    "QContext",
    "QDifferenceEquation",
    "QSeriesError",
    "SeriesKind",
    "SeriesSpec",
    "SlaterParams",
    "SpiralSpec",
    "SweepConfig",
    "SweepReport",
    "TruncatedValue",
    "borel_image_2psi2",
    "connection_coefficient",
    "corollary_2psi2_rhs",
    "heine_equation",
    "main_theorem_rhs",
    "phi_series",
    "psi2x1_coefficients",
    "psi2x1_equation",
    "psi_series",
    "q_borel_plus",
    "q_laplace_plus",
    "qde_residual",
    "qpochhammer",
    "qpochhammer_inf",
    "qpochhammer_multi",
    "ramanujan_product",
    "ramanujan_theta_form",
    "read_report",
    "resum_2psi1",
    "roundtrip_check",
    "run_sweep",
    "slater_rhs",
    "theta",
    "v_solution",
    "watson_rhs",
    "write_report",
    "y_infinity",
]
