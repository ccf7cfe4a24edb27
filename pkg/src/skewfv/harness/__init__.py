"""Verification cases, case files, sampling, metrics and the command line."""
from .cases import (RunArtifacts, build_mesh, run_circle_translation, run_convergence_study,
                    run_plug_flow, run_planar_diffusion)
from .config import CaseSpec, defaults_for, dump_case, load_case, parse_case_text

__all__ = [
    "RunArtifacts", "build_mesh", "run_circle_translation", "run_convergence_study",
    "run_plug_flow", "run_planar_diffusion", "CaseSpec", "defaults_for", "dump_case",
    "load_case", "parse_case_text",
]
