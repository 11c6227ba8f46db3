"""Conserved complex structures for Klein-Gordon fields on lattice spacetimes."""
from . import catalog, conservation, evolution, jstruct, kernels, phase, specfun, spectral, vacua
from .catalog import SpacetimeSpec, SpatialModel, make_spec
from .errors import *  # noqa: F401,F403
from .vacua import Vacuum

__version__ = "0.1.0"
