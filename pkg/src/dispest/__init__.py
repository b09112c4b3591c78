"""Displacement estimation with post-selected probe/ancilla measurements."""
from .bayes import (
    NullEventError,
    PosteriorSummary,
    Prior,
    WindowReport,
    marginal_py,
    posterior_summary,
    vp_bayes,
    window_average,
    window_scan,
)
from .filters import (
    CrossFockFilter,
    FockFilter,
    GaussianFilter,
    GkpFilter,
    MixtureFilter,
    NumericConvolutionFilter,
    TraceFilter,
    heterodyne_filter,
)
from .gaussian import classical_bound, gaussian_bound

__version__ = "0.1.0"
