"""Simulator for the two-qubit all-or-nothing hidden-variable test."""

from .harness import ExperimentConfig, run_experiment, run_verify
from .nchv import HiddenState, Pattern, classify, enumerate_all, evaluate, verify_nchv_theorems
from .observables import (
    build_maximal_observable,
    build_product_observable,
    build_proposition_basis,
    recover_projectors,
)
from .qm import born, measure_maximal, prepare, sample, sample_sequential, verify_qm_theorems

__all__ = [
    "ExperimentConfig", "HiddenState", "Pattern", "born", "build_maximal_observable",
    "build_product_observable", "build_proposition_basis", "classify", "enumerate_all",
    "evaluate", "measure_maximal", "prepare", "recover_projectors", "run_experiment",
    "run_verify", "sample", "sample_sequential", "verify_nchv_theorems", "verify_qm_theorems",
]
