"""Operators associated with sign-indefinite quadratic forms."""

import json

from ._indefrep import (
    Error,
    InputError,
    assemble_offdiag,
    associate_general,
    check_hypothesis,
    eig_sym,
    gen_counterexample,
    gen_random,
    kernel_via_theorem,
    min_abs_eig,
    nullspace,
    op_norm,
    resolvent_identity_residual,
    sgn_matrix,
    spectral_identity_residual,
    stability_suite,
)
from ._indefrep import run as _run

__all__ = [
    "Error",
    "InputError",
    "assemble_offdiag",
    "associate_general",
    "check_hypothesis",
    "eig_sym",
    "gen_counterexample",
    "gen_random",
    "kernel_via_theorem",
    "min_abs_eig",
    "nullspace",
    "op_norm",
    "resolvent_identity_residual",
    "run",
    "sgn_matrix",
    "spectral_identity_residual",
    "stability_suite",
]


def run(spec, mode="all"):
    """Run a ProblemSpec (dict or JSON text). Returns (report dict, exit code)."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    report, code = _run(text, mode)
    return json.loads(report), code
