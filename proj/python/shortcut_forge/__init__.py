"""Shortcuts to adiabaticity: counterdiabatic driving, fast-forward scaling and speed limits."""

import json

from . import _core
from ._core import (  # noqa: F401
    DimensionMismatch,
    InvalidArgument,
    NumericalError,
    exact_cd,
    fidelity,
    hbar,
    krylov_cd,
    krylov_coefficients,
    pauli,
    random_hermitian,
    set_hbar,
    standard_deviation,
    step_unitary,
    trotter_baseline,
    variational_cd,
)

__version__ = _core.__version__


def run_scenario(config):
    """Run a scenario given as a dict or JSON text.

    Returns (summary, tables) where tables maps file names to (columns, rows).
    """
    text = config if isinstance(config, str) else json.dumps(config)
    summary, tables = _core.run_scenario(text)
    return json.loads(summary), tables
