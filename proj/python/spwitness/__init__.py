"""Single-photon entanglement witness toolkit."""

import json

from ._core import (
    BoundResult,
    CutoffOverflow,
    LocalPhotonStats,
    SolverError,
    analytic_multiphoton_bound,
    bound_with_uncertainties,
    fock_wavefunction,
    km_equivalent,
    local_stats,
    partial_transpose_01,
    pattern_function,
    pjoint_closed_form_bound,
    qubit_projector,
    qubit_s_max,
    qubit_sep_bound,
    s_exact,
    s_lossy,
    sdp_enhanced_bound,
    sdp_original_bound,
    sep_bound_lossy,
    sep_bound_lossy_asym,
    sep_bound_lossy_sym,
    witness_matrix,
)
from . import _core

__all__ = [
    "BoundResult",
    "CutoffOverflow",
    "LocalPhotonStats",
    "SolverError",
    "analytic_multiphoton_bound",
    "bound_with_uncertainties",
    "certify",
    "extract",
    "fock_wavefunction",
    "km_equivalent",
    "local_stats",
    "partial_transpose_01",
    "pattern_function",
    "pjoint_closed_form_bound",
    "qubit_projector",
    "qubit_s_max",
    "qubit_sep_bound",
    "s_exact",
    "s_lossy",
    "sample_csv",
    "sdp_enhanced_bound",
    "sdp_original_bound",
    "sep_bound_lossy",
    "sep_bound_lossy_asym",
    "sep_bound_lossy_sym",
    "sweep_csv",
    "verdict",
    "witness_matrix",
]


def sweep_csv(config):
    """Run a loss sweep described by a config dict and return the CSV text."""
    return _core._sweep_csv(json.dumps(config))


def verdict(config):
    """Full report for a single-point config, as a dict."""
    return json.loads(_core._verdict_json(json.dumps(config)))


def certify(grid=(0.05, 0.1, 0.25, 0.5), lambda_perturbation=0.0, tolerance=1e-10):
    """Residual table of the closed-form dual certificate."""
    return json.loads(_core._certify_json(list(grid), lambda_perturbation, tolerance))


def sample_csv(p1, p2, eta_a, eta_b, n_per_setting, seed=1):
    """Quadrature samples of the modeled source as CSV text."""
    return _core._sample_csv(p1, p2, eta_a, eta_b, n_per_setting, seed)


def extract(csv_text, levels=3):
    """Witness value and photon statistics estimated from samples CSV text."""
    return json.loads(_core._extract_json(csv_text, levels))
