"""Numerical toolkit for Hölder continuity of ring Q-mappings and degenerate Beltrami equations."""

from .beltrami import (
    BeltramiCoefficient,
    PlanarMap,
    ReflectedMap,
    annulus_mass_bound,
    coefficient_of_map,
    inversion_weight_max,
    jacobian,
    max_dilatation,
    parse_mu_spec,
    reflect_coefficient,
    reflect_map,
    reflected_mass_bound,
    wirtinger_derivatives,
)
from .certificates import (
    ConditionReport,
    HolderCertificate,
    ball_mean_certificate,
    ball_mean_condition,
    boundary_condition,
    boundary_holder_certificate,
    cor3_certificate,
    dini_condition,
    fmv_integral_condition,
    holder_certificate_interior,
    weighted_ball_condition,
)
from .doubling import DoublingFunction, check_doubling, parse_doubling_spec
from .errors import (
    DegenerateFitError,
    DomainError,
    FieldSpecError,
    GridFormatError,
    InputError,
    QCError,
    Refusal,
    UnsupportedMapError,
)
from .fields import BenchmarkMap, ScalarField, identity_map, parse_field_spec, parse_map_spec, radial_stretch
from .geometry import INF, chordal_distance, ring_modulus, sphere_area, sphere_quadrature
from .harness import empirical_holder_exponent, oracle_integral, verify_ring_inequality
from .means import annulus_weighted_integral, ball_mean, half_disk_mean, spherical_mean

__version__ = "0.1.0"
