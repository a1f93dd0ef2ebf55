from .accounting import model_flops
from .builders import MODEL_KINDS, build_model, build_texture_cnn, build_texture_hocnn, first_block, report_param_totals
from .evaluation import confusion_matrix, evaluate, validation_metrics
from .gradcheck import model_gradient_check, numerical_gradient, relative_error
from .layers import (
    Activation,
    BatchNorm2d,
    Conv2d,
    Dropout,
    Flatten,
    HoConv,
    Layer,
    Linear,
    MaxPool2d,
    build_layer,
    layer_backward,
    layer_forward,
)
from .losses import softmax_cross_entropy
from .model import Model
from .optim import AdamWState, adamw_step
from .schedule import early_stop, reduce_lr_on_plateau
from .trainer import train
