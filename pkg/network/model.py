import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import ParameterError, ShapeError
from core.rng import RngState
from network.layers import Dropout, Layer, build_layer

logger = logging.getLogger(__name__)


class Model:
    """
    Ordered layer stack for a fixed CHW input shape.

    ``tags`` names layer outputs (``block1``, ``block2``, ``logits``...) for
    activation readout. Parameters are addressed as ``"<layer index>.<name>"``.
    """

    def __init__(self, layers: Sequence[Layer], input_shape: Tuple[int, ...], tags: Optional[Dict[str, int]] = None,
                 name: str = "model"):
        self.layers = list(layers)
        self.input_shape = tuple(int(d) for d in input_shape)
        self.tags = dict(tags or {})
        self.name = name
        self.training = True
        self._caches: Optional[List] = None
        self.layer_shapes = self._chain_shapes()
        for tag, index in self.tags.items():
            if not 0 <= index < len(self.layers):
                raise ParameterError(f"Tag '{tag}' points at layer {index}, model has {len(self.layers)}")

    def _chain_shapes(self) -> List[Tuple[int, ...]]:
        shapes = []
        shape = self.input_shape
        for index, layer in enumerate(self.layers):
            try:
                shape = tuple(layer.output_shape(shape))
            except ShapeError as e:
                raise ShapeError(f"Layer {index} ({layer.kind}): {e}") from e
            shapes.append(shape)
        return shapes

    @property
    def output_shape(self) -> Tuple[int, ...]:
        return self.layer_shapes[-1] if self.layer_shapes else self.input_shape

    @property
    def mode(self) -> str:
        return "train" if self.training else "eval"

    def train(self) -> "Model":
        self.training = True
        return self

    def eval(self) -> "Model":
        self.training = False
        return self

    def bind_rng(self, rng: RngState):
        """Give every dropout layer its own substream of ``rng``."""
        for index, layer in enumerate(self.layers):
            if isinstance(layer, Dropout):
                layer.rng = rng.substream(index)

    def _check_input(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 3 and len(self.input_shape) == 3:
            x = x[:, None]
        if x.shape[1:] != self.input_shape:
            raise ShapeError(f"Model expects inputs of shape (N, {self.input_shape}), got {x.shape}")
        return x

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = self._check_input(x)
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x, self.training)
            caches.append(cache)
        self._caches = caches
        return x

    def backward(self, grad_out: np.ndarray) -> Tuple[np.ndarray, Dict[str, np.ndarray]]:
        if self._caches is None:
            raise ParameterError("backward called before forward")
        grads: Dict[str, np.ndarray] = {}
        grad = grad_out
        for index in range(len(self.layers) - 1, -1, -1):
            grad, layer_grads = self.layers[index].backward(self._caches[index], grad)
            for name, value in layer_grads.items():
                grads[f"{index}.{name}"] = value
        return grad, grads

    def activations(self, x: np.ndarray, tags: Iterable[str]) -> Dict[str, np.ndarray]:
        """Outputs of the tagged layers, each flattened to (N, units)."""
        tags = list(tags)
        missing = [tag for tag in tags if tag not in self.tags]
        if missing:
            raise ParameterError(f"Unknown layer tags {missing}; model has {sorted(self.tags)}")
        wanted = {self.tags[tag]: tag for tag in tags}
        last = max(wanted) if wanted else -1
        x = self._check_input(x)
        out = {}
        for index, layer in enumerate(self.layers[:last + 1]):
            x, _ = layer.forward(x, self.training)
            if index in wanted:
                out[wanted[index]] = x.reshape(x.shape[0], -1).copy()
        return {tag: out[tag] for tag in tags}

    def parameters(self) -> Dict[str, np.ndarray]:
        return {f"{index}.{name}": value for index, layer in enumerate(self.layers) for name, value in layer.params().items()}

    def state_arrays(self) -> List[Tuple[str, np.ndarray]]:
        """Every stored array in declaration order: per layer, parameters then running statistics."""
        arrays = []
        for index, layer in enumerate(self.layers):
            for name, value in list(layer.params().items()) + list(layer.buffers().items()):
                arrays.append((f"{index}.{name}", value))
        return arrays

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {key: value.copy() for key, value in self.state_arrays()}

    def restore(self, snapshot: Dict[str, np.ndarray]):
        for key, value in self.state_arrays():
            if key not in snapshot or snapshot[key].shape != value.shape:
                raise ShapeError(f"Snapshot does not match array '{key}' of shape {value.shape}")
            np.copyto(value, snapshot[key])

    def param_total(self, include_batchnorm: bool = True) -> int:
        total = 0
        for layer in self.layers:
            if layer.kind == "batchnorm2d" and not include_batchnorm:
                continue
            total += sum(value.size for value in layer.params().values())
        return total

    def describe(self) -> Dict:
        return {
            "name": self.name,
            "input_shape": list(self.input_shape),
            "tags": dict(sorted(self.tags.items())),
            "layers": [layer.describe() for layer in self.layers],
        }

    @classmethod
    def from_description(cls, description: Dict) -> "Model":
        """Rebuild the layer stack with zero weights; values come from a checkpoint."""
        try:
            layers = [build_layer(layer) for layer in description["layers"]]
            return cls(layers, tuple(description["input_shape"]), description.get("tags"), description.get("name", "model"))
        except (KeyError, TypeError) as e:
            raise ParameterError(f"Invalid model description: {e}") from e
