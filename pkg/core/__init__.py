from .errors import ConfigError, DivergenceError, FormatError, ParameterError, ShapeError
from .rng import RngState, rng_bernoulli, rng_normal, rng_uniform, seeded_rng
from .tensor import add, as_tensor, matmul, mul, patch_extract, patch_scatter, reshape, scale, transpose
