"""Information geometry on real and complex parametric density families."""
from .densities import (
    DensityFamily,
    DiscreteDistribution,
    evaluate_density,
    evaluate_score,
    make_complex_gaussian,
    make_gaussian,
    make_warped_gaussian,
    normalization_check,
    parse_family,
)
from .divergence import expansion_residuals, kl_discrete, kullback_number, shannon_entropy
from .fisher import (
    MetricTensor,
    fd_score,
    fisher_analytic,
    fisher_monte_carlo,
    fisher_quadrature,
    reparametrize_check,
    rescale,
)
from .geometry import check_lorentzian, displacement_interval, interval, signature
from .integrate import QuadratureSpec, hermite_nodes, integrate, refine

__version__ = "0.1.0"
