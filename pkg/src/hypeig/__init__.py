"""Certified Laplace spectra and spectral determinants on hyperbolic surfaces."""

from .geometry import (
    Curve,
    FenchelNielsen,
    GraphError,
    SurfaceDecomposition,
    build_decomposition,
    make_grids,
    min_nonadjacent_side_distance,
)
from .radial import (
    RadialBasis,
    RadialSolution,
    SpectralParameter,
    hypergeometric_reference,
    normalize,
    solve_radial,
    truncation_bound,
)
from .search import EigenvalueEnclosure, ScanConfig, SpectrumCertificate, certify, exclude, scan
from .surfaces import PRESETS, load_surface
from .trace import (
    EigEntry,
    LengthSpectrumEntry,
    ZetaResult,
    casimir_energy,
    completeness_check,
    determinant,
    heat_trace,
    log_det,
    zeta_value,
)

__version__ = "0.1.0"
