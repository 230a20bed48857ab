"""Matrix-weighted L^p toolkit: Muckenhoupt constants, bandlimited
multipliers with explicit boundedness constants, and matrix-weighted Besov
norm equivalence, discretized on a periodic torus."""

from .weights import (
    WeightSpec,
    dilate_weight,
    evaluate_weight,
    hermitian_power,
    spectral_norm,
    weight_root_at,
)
from .muckenhoupt import (
    ApEstimate,
    CubeFamily,
    DoublingReport,
    ap_constant,
    ap_constant_large_p,
    ap_constant_small_p,
    doubling_report,
    scalar_reduction,
)
from .spectral import (
    MultiplierSymbol,
    SampledVectorField,
    TorusGrid,
    apply_multiplier,
    bandlimit_check,
    decay_constant,
    forward_transform,
    inverse_transform,
    lp_w_norm,
    make_symbol,
    sampling_series,
    synthesize_bandlimited,
    constant_one,
    gaussian_symbol,
    raised_cosine,
    smooth_bump,
    triangle,
)
from .bound import (
    BoundednessReport,
    empirical_ratio,
    large_p_ratio,
    lattice_sum_L,
    make_corpus,
    peetre_constant,
    rescale_experiment,
    theoretical_constant,
)
from .besov import (
    BesovParams,
    DyadicPartition,
    besov_norm,
    equivalence_experiment,
    make_partition,
    overlap_sets,
    partition_decay_check,
)

__version__ = "0.1.0"
