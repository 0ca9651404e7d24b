"""Exact simulation of path-spin interferometry and its hidden-variable analyses."""

from .elements import BeamSplitterParams, SpinSetting, ThetaPolarization
from .experiments import (
    SubensembleReport,
    SweepGrid,
    closed_form_subensembles,
    compare_de_zela,
    correlator,
    prepare_de_zela,
    prepare_pan_home,
    run_de_zela,
    run_path_spin,
    sweep,
)
from .qcore import PathSpinState, SpinState

__all__ = [
    "BeamSplitterParams",
    "PathSpinState",
    "SpinSetting",
    "SpinState",
    "SubensembleReport",
    "SweepGrid",
    "ThetaPolarization",
    "closed_form_subensembles",
    "compare_de_zela",
    "correlator",
    "prepare_de_zela",
    "prepare_pan_home",
    "run_de_zela",
    "run_path_spin",
    "sweep",
]
