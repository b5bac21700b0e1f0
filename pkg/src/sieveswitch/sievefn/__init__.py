"""Buchstab, rough-number density and linear sieve functions."""

from .functions import (
    SieveFunctions,
    big_C,
    buchstab,
    default_functions,
    f_closed_form,
    linear_sieve_F,
    linear_sieve_f,
    little_c,
)
from .tables import EULER_GAMMA, EXP_GAMMA, TWO_EXP_GAMMA, FunctionTable, tabulate

__all__ = [
    "EULER_GAMMA",
    "EXP_GAMMA",
    "TWO_EXP_GAMMA",
    "FunctionTable",
    "SieveFunctions",
    "big_C",
    "buchstab",
    "default_functions",
    "f_closed_form",
    "linear_sieve_F",
    "linear_sieve_f",
    "little_c",
    "tabulate",
]
