"""Correlation-space simulation of measurement-based quantum computation on
matrix-product resource states, with checks of how physical errors appear there."""

from .channels import KrausChannel, f1_error, phase_error, random_cptp, swap_error
from .correlation import MeasurementBasis, branch_operator, induced_kraus, mixed_map, per_outcome_map, tp_certificate
from .cptp import SuperOperator, Verdict, choi, classify
from .resource import ResourceMPS, aklt, cluster_1d, random_resource, to_dense, validate

__version__ = "0.1.0"
