"""Exact rational, polynomial, interval and algebraic-number arithmetic."""

from .algebraic import (
    PRECISION_CAP,
    START_PREC,
    AlgebraicNumber,
    enclose,
    field_arith,
    isolate_roots,
    nth_power_positive_real_order,
    real_sign,
    root_of_unity_order,
)
from .interval import Box, Interval, arg_turns_of, pi_interval
from .numberfield import FieldElement, NumberField
from .poly import Polynomial
from .rational import format_rational, parse_rational

__all__ = [
    "AlgebraicNumber",
    "Box",
    "FieldElement",
    "Interval",
    "NumberField",
    "PRECISION_CAP",
    "Polynomial",
    "START_PREC",
    "arg_turns_of",
    "enclose",
    "field_arith",
    "format_rational",
    "isolate_roots",
    "nth_power_positive_real_order",
    "parse_rational",
    "pi_interval",
    "real_sign",
    "root_of_unity_order",
]
