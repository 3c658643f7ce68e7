"""Consistent completions of rank-2 scattering diagrams and their theta
functions, computed exactly from Jeffrey-Kirwan residues of tree potentials
and checked against inductive and broken-line oracles."""

from .algebra import GradedSeries, Lattice, WallCrossing, bch, dilog_generator, exp_action, lie_bracket
from .assembler import complete_jk, complete_jk_detailed, wall_coefficient
from .diagram import ScatteringDiagram, Wall, consistency_defect, equivalent, kronecker_diagram
from .jk import RationalSection, SurdScalar, iterated_residue, jk_global, jk_local
from .oracle import complete_inductive
from .theta import theta_broken, theta_jk
from .trees import LabelledTree, build_potential, enumerate_trees

__all__ = [
    "GradedSeries",
    "LabelledTree",
    "Lattice",
    "RationalSection",
    "ScatteringDiagram",
    "SurdScalar",
    "Wall",
    "WallCrossing",
    "bch",
    "build_potential",
    "complete_inductive",
    "complete_jk",
    "complete_jk_detailed",
    "consistency_defect",
    "dilog_generator",
    "enumerate_trees",
    "equivalent",
    "exp_action",
    "iterated_residue",
    "jk_global",
    "jk_local",
    "kronecker_diagram",
    "lie_bracket",
    "theta_broken",
    "theta_jk",
    "wall_coefficient",
]
