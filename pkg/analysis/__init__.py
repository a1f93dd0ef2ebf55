from .pca import ExplainedVariance, pc_count_for_threshold, pca_explained_variance
from .rdm import (
    DistanceDistribution,
    Rdm,
    average_rdms,
    compute_rdm,
    count_modes,
    distance_distribution,
    rdm_compare,
)
from .representations import (
    block_activations,
    cross_layer_rdm_correlation,
    order_activations,
    order_rdms,
    seed_averaged_rdms,
)
from .tied_weights import TiedWeightResult, tied_weight_activations, tied_weight_experiment
