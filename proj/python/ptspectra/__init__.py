"""Spectra and PT phase analysis of coupled non-Hermitian oscillators.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports it under shorter names.
"""

from ._core import (
    CriticalResult,
    Error,
    classify,
    compile_expr,
    critical_coupling,
    critical_field,
    eig,
    eigenvalues,
    find_critical_model1,
    find_critical_model2,
    hamiltonian_model1,
    model1_levels,
    model2_levels,
    normal_modes,
    normalize,
    pt_check,
    run_cli,
)

__all__ = [
    "CriticalResult",
    "Error",
    "classify",
    "compile_expr",
    "critical_coupling",
    "critical_field",
    "eig",
    "eigenvalues",
    "find_critical_model1",
    "find_critical_model2",
    "hamiltonian_model1",
    "model1_levels",
    "model2_levels",
    "normal_modes",
    "normalize",
    "pt_check",
    "run_cli",
]
