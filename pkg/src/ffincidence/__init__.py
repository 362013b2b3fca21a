"""Incidences between point pairs and rigid motions over finite fields."""
from .errors import (
    ConstructionError,
    DomainError,
    FFIncidenceError,
    InvalidField,
    NotApplicable,
    ResourceError,
    ShapeError,
    Unsupported,
)
from .field_core import FieldContext, gauss_sum, make_field
from .incidence import count_incidences, count_N, exceptional_set, intersection_histogram
from .motions import MotionSet, OrthogonalGroup, enumerate_orthogonal_group, orthogonal_group_order
from .projections import Subspace, enumerate_grassmannian, orthogonal_complement, project
from .spectral import Spectrum, dft
from .theorems import REGISTRY, Instance, evaluate
from .vector_geometry import PairSet, PointSet, Space, space

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "DomainError",
    "FFIncidenceError",
    "FieldContext",
    "Instance",
    "InvalidField",
    "MotionSet",
    "NotApplicable",
    "OrthogonalGroup",
    "PairSet",
    "PointSet",
    "REGISTRY",
    "ResourceError",
    "ShapeError",
    "Space",
    "Spectrum",
    "Subspace",
    "Unsupported",
    "count_N",
    "count_incidences",
    "dft",
    "enumerate_grassmannian",
    "enumerate_orthogonal_group",
    "evaluate",
    "exceptional_set",
    "gauss_sum",
    "intersection_histogram",
    "make_field",
    "orthogonal_complement",
    "orthogonal_group_order",
    "project",
    "space",
]
