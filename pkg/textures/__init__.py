from .datasets import SPLITS, TextureDataset, composite_image, generate_dataset, stimulus_set
from .gliders import CLASS_NAMES, GliderClass, implied_gliders
from .perturbation import mix_perturbation, perturbation_textures
from .synthesis import generate_batch, generate_texture, glider_parity_statistic
