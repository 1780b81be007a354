"""Sylvester, Lyapunov and Riccati solvers."""

import json

from ._core import (
    MatrixOptError,
    ammonia_reactor,
    care_admm,
    care_residual,
    ccom,
    lyapunov_admm,
    lyapunov_residual,
    newton_admm,
    newton_care,
    quasi_newton,
    solve_lyapunov_direct,
    solve_sylvester_direct,
    sylvester_residual,
)
from ._core import run_json as _run_json

__all__ = [
    "MatrixOptError",
    "ammonia_reactor",
    "care_admm",
    "care_residual",
    "ccom",
    "lyapunov_admm",
    "lyapunov_residual",
    "newton_admm",
    "newton_care",
    "quasi_newton",
    "run",
    "solve_lyapunov_direct",
    "solve_sylvester_direct",
    "sylvester_residual",
]


def run(equation, method, generator, n=0, seed=0, **settings):
    """Run a generated problem through the harness; returns (report, exit_code)."""
    text, code = _run_json(equation, method, generator, n, seed,
                           {k: str(v) for k, v in settings.items()})
    return json.loads(text), code
