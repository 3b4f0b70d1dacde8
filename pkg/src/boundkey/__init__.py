"""Bound-entangled multipartite states with distillable key: constructions, protocol and bounds."""

__version__ = "0.1.0"

from .blocks import BlockOperator
from .cq import CqState, measure_to_cq
from .linalg import ComplexMatrix, Party, Shape
from .states import (PditSpec, construction_one, construction_two, ghz, ideal_cq, omega,
                     pdit, pdit_example, seed_unitary, smolin_family)

__all__ = [
    "BlockOperator", "ComplexMatrix", "CqState", "Party", "PditSpec", "Shape",
    "construction_one", "construction_two", "ghz", "ideal_cq", "measure_to_cq", "omega",
    "pdit", "pdit_example", "seed_unitary", "smolin_family",
]
