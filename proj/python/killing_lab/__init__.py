"""Killing tensors on symmetric spaces."""

from ._core import (
    CertificationError,
    albert_det,
    albert_phi,
    bernoulli_c,
    catalog,
    content_hash,
    embedded_geodesic_check,
    jordan_mul,
    metric_coeff,
    odd_field_coeff,
    run_cli,
    solve,
    tangent_basis_at_E,
)

__all__ = [
    "CertificationError",
    "albert_det",
    "albert_phi",
    "bernoulli_c",
    "catalog",
    "content_hash",
    "embedded_geodesic_check",
    "jordan_mul",
    "metric_coeff",
    "odd_field_coeff",
    "run_cli",
    "solve",
    "tangent_basis_at_E",
]
