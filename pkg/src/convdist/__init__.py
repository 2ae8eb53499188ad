"""Distances between convolution powers of discrete probability measures.

The core library computes exact (or certified lower-bound) Kolmogorov,
total-variation, convex-set and Prokhorov distances between lattice and
finite discrete measures, together with the binomial and Gaussian bounds
used to verify the stability rates of consecutive convolution powers.  A
FastAPI service (``convdist.service``) exposes the operations over HTTP and
the ``convdist`` CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .errors import BudgetExceededError, MassConservationError, RejectedInputError
from .measures import (
    Decomposition,
    FiniteMeasure,
    GaussianParams,
    LatticeMeasure,
    bernoulli,
    convolve,
    decompose,
    interpolant,
    load_measure_file,
    measure_from_doc,
    measure_to_doc,
    moments,
    point_mass,
    power,
    rademacher,
    rademacher2d,
    reconstruct_power,
    rescale,
    shift,
    to_finite,
    uniform3,
)
from .metrics import (
    DistanceReport,
    concentration,
    convex_1d,
    convex_2d_lower,
    evaluate_witness,
    kolmogorov,
    quantile,
    total_variation,
)
from .prokhorov import (
    CouplingPlan,
    ProkhorovResult,
    coupling_check,
    naive_shift_coupling,
    prokhorov_bruteforce,
    prokhorov_exact,
    scaling_transfer,
)
from .binomial_gaussian import (
    BinomialSpec,
    bernstein_bound,
    binom_pmf,
    binom_tv_identity,
    binomial_weights,
    gaussian_conv_tv_bound,
    gaussian_kolmogorov_1d,
    gaussian_tv_lemma1,
    ratio_monotone,
)

__all__ = [
    "__version__",
    "BudgetExceededError",
    "MassConservationError",
    "RejectedInputError",
    "Decomposition",
    "FiniteMeasure",
    "GaussianParams",
    "LatticeMeasure",
    "bernoulli",
    "convolve",
    "decompose",
    "interpolant",
    "load_measure_file",
    "measure_from_doc",
    "measure_to_doc",
    "moments",
    "point_mass",
    "power",
    "rademacher",
    "rademacher2d",
    "reconstruct_power",
    "rescale",
    "shift",
    "to_finite",
    "uniform3",
    "DistanceReport",
    "concentration",
    "convex_1d",
    "convex_2d_lower",
    "evaluate_witness",
    "kolmogorov",
    "quantile",
    "total_variation",
    "CouplingPlan",
    "ProkhorovResult",
    "coupling_check",
    "naive_shift_coupling",
    "prokhorov_bruteforce",
    "prokhorov_exact",
    "scaling_transfer",
    "BinomialSpec",
    "bernstein_bound",
    "binom_pmf",
    "binom_tv_identity",
    "binomial_weights",
    "gaussian_conv_tv_bound",
    "gaussian_kolmogorov_1d",
    "gaussian_tv_lemma1",
    "ratio_monotone",
]
