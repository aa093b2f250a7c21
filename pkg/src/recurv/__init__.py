"""Jet-based curvature engine and checks for extended-recurrent spacetimes."""
from .catalog import MetricSpec, ScaleFactor, build_metric, sample_points, standard_catalog
from .curvature import CurvaturePack, MetricField, build_pack, pack_from_tensors
from .jets import Jet, seed_variables
from .tensors import MetricAtPoint, Tensor
from .tolerances import DEFAULT, Tolerances

__version__ = "0.1.0"

__all__ = [
    "MetricSpec", "ScaleFactor", "build_metric", "sample_points", "standard_catalog",
    "CurvaturePack", "MetricField", "build_pack", "pack_from_tensors",
    "Jet", "seed_variables", "MetricAtPoint", "Tensor", "DEFAULT", "Tolerances", "__version__",
]
