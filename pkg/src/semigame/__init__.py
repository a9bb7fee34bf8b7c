"""Compile certified semi-algebraic sets into binary games and verify the result exactly."""

from .certificate import (
    Certificate,
    CertificateError,
    eval_poly,
    membership,
    parse_certificate,
    to_selector,
    transform_to_unit_box,
    validate_witness,
)
from .compiler import compile_certificate, compile_equilibrium, compile_payoff, player_count
from .game import BinaryGame, MixedProfile, MultiaffineMap, check_equilibrium, eval_map, payoff_gap
from .integer import compile_integer
from .polynomial import Polynomial
from .verifier import canonical_profile, grid_scan_equilibria, project_grid, refute

__version__ = "0.1.0"

__all__ = [
    "BinaryGame",
    "Certificate",
    "CertificateError",
    "MixedProfile",
    "MultiaffineMap",
    "Polynomial",
    "canonical_profile",
    "check_equilibrium",
    "compile_certificate",
    "compile_equilibrium",
    "compile_integer",
    "compile_payoff",
    "eval_map",
    "eval_poly",
    "grid_scan_equilibria",
    "membership",
    "parse_certificate",
    "payoff_gap",
    "player_count",
    "project_grid",
    "refute",
    "to_selector",
    "transform_to_unit_box",
    "validate_witness",
]
