"""Spectral sequences of C2 acting on Lubin-Tate theory at the prime 2.

Pages are lists of cyclic summands (a coefficient module times a monomial)
and differentials are congruence rules on exponents, so every page is
computed exactly.
"""

from .coefficients import CatalogError, CyclicModule, Kind, RingContext, catalog, mod2, qz, witt
from .pages import EngineError, Page, Summand, Window
from .presets import PresetId, SpectralSequence, build, compute, period

__version__ = "0.1.0"

__all__ = [
    "CatalogError",
    "CyclicModule",
    "EngineError",
    "Kind",
    "Page",
    "PresetId",
    "RingContext",
    "SpectralSequence",
    "Summand",
    "Window",
    "build",
    "catalog",
    "compute",
    "mod2",
    "period",
    "qz",
    "witt",
]
