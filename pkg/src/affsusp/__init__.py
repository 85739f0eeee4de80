"""Exact construction of automorphisms of real affine suspensions ``uv = f``."""

from .config import ChoiceAlphaConfig, EngineOptions, generic_param
from .derivation import AutomorphismScript, Derivation, FlowStep, compose, realize
from .errors import SuspError
from .geometry import AffineSpace, MockGeometry, RangeDescriptor, RangeKind, TowerGeometry
from .polyring import Polynomial, format_poly, parse_poly
from .tower import Side, SuspensionTower, TowerPoint, suspend
from .transit import (
    LevelContext,
    avoid_zero,
    choose_alpha,
    distinct_coords,
    flexibility_certificate,
    level_transit,
    plan_transport,
    transport,
    transport_component,
)

__version__ = "0.1.0"
