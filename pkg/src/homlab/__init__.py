"""Finite homogeneous metric spaces: homogeneity checks, structure theory,
constructions, triangle schemes and extremal distance counts."""

from .space import ColoredSpace, from_metric, load_space, new_space

__version__ = "0.1.0"

__all__ = ["ColoredSpace", "from_metric", "load_space", "new_space", "__version__"]
