"""Free-convolution tools for the spectra of deformed random matrix models.

Limiting spectral laws, their supports, outliers generated by spikes and
eigenvector overlaps, together with a Monte Carlo harness to check them.
"""

from .errors import (
    ComponentOverflow,
    DomainError,
    EvaluationError,
    FreeDeformError,
    GapError,
    NoConvergence,
    NotAnOutlier,
    NotHermitian,
    RangeError,
    ShapeError,
)
from .freeconv import (
    SolverConfig,
    additive_g,
    additive_subordination,
    convolve_density,
    deformed_wigner_g,
    info_noise_g,
    multiplicative_g,
    multiplicative_subordination,
    sample_cov_g,
)
from .measures import (
    Atomic,
    GridDensity,
    MarchenkoPastur,
    Measure,
    Mixture,
    Semicircle,
    dirac,
    stieltjes,
)
from .models import DeformedModel
from .spiked import (
    SpikedDeformation,
    classify_spikes,
    isotropic_outliers,
    isotropic_overlap,
    overlap,
    separation_map,
)
from .support import admissible_set, mobile_edges, phi, phi_prime, support_intervals, varphi

__version__ = "0.1.0"
