"""Continued fractions, exception sets and near-recurrence residuals."""

from .cf import (
    ContinuedFractionExpansion,
    ConvergentReport,
    DiophantineReport,
    RealGenerator,
    SelectionSequence,
    cf_expand,
    check_prop_dio,
    select_r,
    triggering_q,
    verify_convergent_facts,
)
from .delta import (
    DeltaRecord,
    GapStats,
    Oscillator,
    ResidualReport,
    enumerate_delta,
    fit_constant,
    gap_report,
    near_recurrence_residual,
    residual_curve,
    signed_identity_holds,
    theoretical_constant,
)
