from .accounting import FlopReport, ParamCount, flop_count, param_count
from .functional import (
    HoConvGradients,
    contract_full_tensor,
    evaluate_kernel,
    expand_to_full_tensor,
    hoconv_backward,
    hoconv_forward,
    hoconv_order_maps,
    monomial_features,
)
from .kernel import HoConvLayer, HoKernel, order_scale
from .monomials import MonomialIndex, cumulative_count, enumerate_monomials, unique_count
