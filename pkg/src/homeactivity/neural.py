"""Forward-pass primitives for small sequence classifiers.

Everything here is inference only and written against plain numpy so the
arithmetic stays inspectable: conv/pool/dense layers, LSTM and GRU cells,
a JSON weights-bundle format that composes them into a stack, and a
nearest-centroid fallback classifier for feature vectors.

The LSTM cell follows the gate equations

    i_t = sigmoid(W_i h_{t-1} + U_i x_t + b_i)
    f_t = sigmoid(W_f h_{t-1} + U_f x_t + b_f)
    o_t = sigmoid(W_o h_{t-1} + U_o x_t + b_o)
    s~  = g(W_c h_{t-1} + U_c x_t + b_c)
    s_t = f_t * s_{t-1} + i_t * s~
    h_t = o_t * g(s_t)

with the candidate activation g defaulting to the logistic function; pass
candidate_activation="tanh" for the more common variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

BUNDLE_FORMAT = "weights.v1"
CENTROID_FORMAT = "centroids.v1"

LSTM_GATES = ("input", "forget", "output", "candidate")
GRU_GATES = ("update", "reset", "candidate")


class BundleError(ValueError):
    """Raised when a weights bundle is malformed or internally inconsistent."""


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def relu(x):
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def softmax(x):
    v = np.asarray(x, dtype=np.float64)
    e = np.exp(v - v.max())
    return e / e.sum()


ACTIVATIONS = {
    "sigmoid": sigmoid,
    "tanh": np.tanh,
    "relu": relu,
    "linear": lambda x: np.asarray(x, dtype=np.float64),
    "softmax": softmax,
}


def conv1d_forward(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Valid cross-correlation along time.

    x is (steps, channels), kernel is (kernel_len, channels, filters),
    bias is (filters,); output is (steps - kernel_len + 1, filters).
    """
    x = np.asarray(x, dtype=np.float64)
    kernel = np.asarray(kernel, dtype=np.float64)
    steps, channels = x.shape
    kernel_len, in_channels, filters = kernel.shape
    if in_channels != channels:
        raise ValueError(f"kernel expects {in_channels} channels, input has {channels}")
    if steps < kernel_len:
        raise ValueError(f"input of {steps} steps is shorter than kernel {kernel_len}")
    taps = np.lib.stride_tricks.sliding_window_view(x, kernel_len, axis=0)
    # taps is (out_steps, channels, kernel_len)
    return np.einsum("tck,kcf->tf", taps, kernel) + np.asarray(bias, dtype=np.float64)


def maxpool1d(x: np.ndarray, pool: int = 2, stride: int = 2) -> np.ndarray:
    """Max over non-padded time windows; trailing remainder is dropped."""
    x = np.asarray(x, dtype=np.float64)
    if pool < 1 or stride < 1:
        raise ValueError(f"pool and stride must be positive, got {pool}, {stride}")
    steps = x.shape[0]
    if steps < pool:
        raise ValueError(f"input of {steps} steps is shorter than pool {pool}")
    count = (steps - pool) // stride + 1
    idx = np.arange(count)[:, None] * stride + np.arange(pool)
    return x[idx].max(axis=1)


def dense_forward(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """weights is (units, in_dim); returns weights @ x + bias."""
    x = np.asarray(x, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if x.ndim != 1 or weights.shape[1] != x.size:
        raise ValueError(f"dense weights {weights.shape} cannot act on input {x.shape}")
    return weights @ x + np.asarray(bias, dtype=np.float64)


def lstm_cell_step(x, h_prev, s_prev, W, U, b, candidate_activation="sigmoid"):
    """One LSTM step; W is (4, units, units), U is (4, units, in_dim),
    b is (4, units) in gate order input, forget, output, candidate.
    Returns (h_t, s_t)."""
    g = ACTIVATIONS[candidate_activation]
    i = sigmoid(W[0] @ h_prev + U[0] @ x + b[0])
    f = sigmoid(W[1] @ h_prev + U[1] @ x + b[1])
    o = sigmoid(W[2] @ h_prev + U[2] @ x + b[2])
    s_tilde = g(W[3] @ h_prev + U[3] @ x + b[3])
    s = f * s_prev + i * s_tilde
    h = o * g(s)
    return h, s


def gru_cell_step(x, h_prev, W, U, b):
    """One GRU step; W is (3, units, units), U is (3, units, in_dim),
    b is (3, units) in gate order update, reset, candidate."""
    z = sigmoid(W[0] @ h_prev + U[0] @ x + b[0])
    r = sigmoid(W[1] @ h_prev + U[1] @ x + b[1])
    h_tilde = np.tanh(W[2] @ (r * h_prev) + U[2] @ x + b[2])
    return (1.0 - z) * h_prev + z * h_tilde


def lstm_forward(
    x, W, U, b, return_sequences=False, candidate_activation="sigmoid"
):
    """Run an LSTM over (steps, in_dim) input from zero initial state."""
    x = np.asarray(x, dtype=np.float64)
    units = np.asarray(b).shape[1]
    h = np.zeros(units)
    s = np.zeros(units)
    outputs = np.empty((x.shape[0], units))
    for t in range(x.shape[0]):
        h, s = lstm_cell_step(x[t], h, s, W, U, b, candidate_activation)
        outputs[t] = h
    return outputs if return_sequences else h


def gru_forward(x, W, U, b, return_sequences=False):
    """Run a GRU over (steps, in_dim) input from zero initial state."""
    x = np.asarray(x, dtype=np.float64)
    units = np.asarray(b).shape[1]
    h = np.zeros(units)
    outputs = np.empty((x.shape[0], units))
    for t in range(x.shape[0]):
        h = gru_cell_step(x[t], h, W, U, b)
        outputs[t] = h
    return outputs if return_sequences else h


@dataclass(frozen=True, eq=False)
class LayerSpec:
    kind: str
    params: dict = field(default_factory=dict)
    weights: dict | None = None


@dataclass(frozen=True, eq=False)
class WeightsBundle:
    """A validated stack of layers plus labelling metadata.

    feature_norm, when present, holds per-channel "mean" and "scale"
    lists applied to the input window as (x - mean) / scale.
    """

    layers: tuple[LayerSpec, ...]
    class_names: tuple[str, ...]
    input_len: int
    input_channels: int
    feature_norm: dict | None = None

    def __post_init__(self):
        validate_bundle(self)


def _gate_weights(spec: LayerSpec, gates: tuple[str, ...], in_dim: int):
    units = int(spec.params["units"])
    n = len(gates)
    W = np.asarray(spec.weights["W"], dtype=np.float64)
    U = np.asarray(spec.weights["U"], dtype=np.float64)
    b = np.asarray(spec.weights["b"], dtype=np.float64)
    if W.shape != (n, units, units):
        raise BundleError(f"{spec.kind} W has shape {W.shape}, want {(n, units, units)}")
    if U.shape != (n, units, in_dim):
        raise BundleError(f"{spec.kind} U has shape {U.shape}, want {(n, units, in_dim)}")
    if b.shape != (n, units):
        raise BundleError(f"{spec.kind} b has shape {b.shape}, want {(n, units)}")
    return W, U, b


def validate_bundle(bundle: WeightsBundle) -> None:
    """Check that layer weight shapes compose from input to class scores."""
    if bundle.input_len < 1 or bundle.input_channels < 1:
        raise BundleError("input_len and input_channels must be positive")
    if not bundle.class_names:
        raise BundleError("bundle declares no class names")
    if bundle.feature_norm is not None:
        for key in ("mean", "scale"):
            vals = bundle.feature_norm.get(key)
            if vals is None or len(vals) != bundle.input_channels:
                raise BundleError(f"feature_norm.{key} must list one value per channel")
        if any(s == 0 for s in bundle.feature_norm["scale"]):
            raise BundleError("feature_norm.scale contains a zero")

    steps, dim = bundle.input_len, bundle.input_channels
    for spec in bundle.layers:
        if spec.kind == "conv1d":
            kernel = np.asarray(spec.weights["kernel"], dtype=np.float64)
            bias = np.asarray(spec.weights["bias"], dtype=np.float64)
            if steps is None:
                raise BundleError("conv1d after a non-sequence layer")
            if kernel.ndim != 3 or kernel.shape[1] != dim:
                raise BundleError(
                    f"conv1d kernel {kernel.shape} cannot act on {dim} channels"
                )
            if bias.shape != (kernel.shape[2],):
                raise BundleError(f"conv1d bias {bias.shape} != filters {kernel.shape[2]}")
            if steps < kernel.shape[0]:
                raise BundleError(
                    f"conv1d kernel {kernel.shape[0]} longer than remaining {steps} steps"
                )
            if spec.params.get("activation", "relu") not in ACTIVATIONS:
                raise BundleError(f"unknown activation {spec.params['activation']!r}")
            steps, dim = steps - kernel.shape[0] + 1, kernel.shape[2]
        elif spec.kind == "maxpool1d":
            pool = int(spec.params.get("pool", 2))
            stride = int(spec.params.get("stride", pool))
            if steps is None:
                raise BundleError("maxpool1d after a non-sequence layer")
            if steps < pool:
                raise BundleError(f"maxpool1d pool {pool} exceeds remaining {steps} steps")
            steps = (steps - pool) // stride + 1
        elif spec.kind == "dropout":
            rate = float(spec.params.get("rate", 0.0))
            if not (0 <= rate < 1):
                raise BundleError(f"dropout rate {rate} outside [0, 1)")
        elif spec.kind in ("lstm", "gru"):
            if steps is None:
                raise BundleError(f"{spec.kind} after a non-sequence layer")
            gates = LSTM_GATES if spec.kind == "lstm" else GRU_GATES
            _gate_weights(spec, gates, dim)
            dim = int(spec.params["units"])
            if not spec.params.get("return_sequences", False):
                steps = None
        elif spec.kind == "dense":
            weights = np.asarray(spec.weights["weights"], dtype=np.float64)
            bias = np.asarray(spec.weights["bias"], dtype=np.float64)
            if steps is not None:
                raise BundleError("dense layer requires a vector, not a sequence")
            if weights.ndim != 2 or weights.shape[1] != dim:
                raise BundleError(f"dense weights {weights.shape} cannot act on {dim} inputs")
            if bias.shape != (weights.shape[0],):
                raise BundleError(f"dense bias {bias.shape} != units {weights.shape[0]}")
            if spec.params.get("activation", "linear") not in ACTIVATIONS:
                raise BundleError(f"unknown activation {spec.params['activation']!r}")
            dim = weights.shape[0]
        else:
            raise BundleError(f"unknown layer kind {spec.kind!r}")
    if steps is not None:
        raise BundleError("stack ends with a sequence; add a non-returning recurrent layer")
    if dim != len(bundle.class_names):
        raise BundleError(
            f"stack emits {dim} values but bundle names {len(bundle.class_names)} classes"
        )


def forward_bundle(bundle: WeightsBundle, window: np.ndarray) -> np.ndarray:
    """Run one (input_len, input_channels) window through the stack."""
    x = np.asarray(window, dtype=np.float64)
    if x.shape != (bundle.input_len, bundle.input_channels):
        raise ValueError(
            f"window shape {x.shape} != ({bundle.input_len}, {bundle.input_channels})"
        )
    if bundle.feature_norm is not None:
        mean = np.asarray(bundle.feature_norm["mean"], dtype=np.float64)
        scale = np.asarray(bundle.feature_norm["scale"], dtype=np.float64)
        x = (x - mean) / scale
    dim = bundle.input_channels
    for spec in bundle.layers:
        if spec.kind == "conv1d":
            act = ACTIVATIONS[spec.params.get("activation", "relu")]
            x = act(conv1d_forward(x, spec.weights["kernel"], spec.weights["bias"]))
            dim = x.shape[1]
        elif spec.kind == "maxpool1d":
            pool = int(spec.params.get("pool", 2))
            x = maxpool1d(x, pool, int(spec.params.get("stride", pool)))
        elif spec.kind == "dropout":
            pass  # inference: identity
        elif spec.kind == "lstm":
            W, U, b = _gate_weights(spec, LSTM_GATES, dim)
            x = lstm_forward(
                x, W, U, b,
                return_sequences=bool(spec.params.get("return_sequences", False)),
                candidate_activation=spec.params.get("candidate_activation", "sigmoid"),
            )
            dim = int(spec.params["units"])
        elif spec.kind == "gru":
            W, U, b = _gate_weights(spec, GRU_GATES, dim)
            x = gru_forward(
                x, W, U, b,
                return_sequences=bool(spec.params.get("return_sequences", False)),
            )
            dim = int(spec.params["units"])
        elif spec.kind == "dense":
            act = ACTIVATIONS[spec.params.get("activation", "linear")]
            x = act(dense_forward(x, spec.weights["weights"], spec.weights["bias"]))
            dim = x.size
    return x


def classify_window(bundle: WeightsBundle, window: np.ndarray) -> str:
    probs = forward_bundle(bundle, window)
    best = np.flatnonzero(probs == probs.max())
    return min(bundle.class_names[i] for i in best)


def _weights_to_lists(weights):
    if weights is None:
        return None
    return {k: np.asarray(v, dtype=np.float64).tolist() for k, v in weights.items()}


def save_bundle(path: str | Path, bundle: WeightsBundle) -> None:
    doc = {
        "format": BUNDLE_FORMAT,
        "input_len": bundle.input_len,
        "input_channels": bundle.input_channels,
        "class_names": list(bundle.class_names),
        "feature_norm": bundle.feature_norm,
        "layers": [
            {"kind": s.kind, "params": s.params, "weights": _weights_to_lists(s.weights)}
            for s in bundle.layers
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_bundle(path: str | Path) -> WeightsBundle:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != BUNDLE_FORMAT:
        raise BundleError(f"unsupported bundle format {doc.get('format')!r}")
    layers = tuple(
        LayerSpec(kind=d["kind"], params=d.get("params", {}), weights=d.get("weights"))
        for d in doc["layers"]
    )
    return WeightsBundle(
        layers=layers,
        class_names=tuple(doc["class_names"]),
        input_len=int(doc["input_len"]),
        input_channels=int(doc["input_channels"]),
        feature_norm=doc.get("feature_norm"),
    )


def make_default_bundle(
    class_names,
    input_len: int = 128,
    input_channels: int = 3,
    seed: int | None = None,
) -> WeightsBundle:
    """Build the stock conv + GRU stack with zero or seeded random weights.

    Stack: conv1d(32 filters, kernel 64) relu, conv1d(128, kernel 64) relu,
    dropout 0.07, maxpool(2, 2), gru(64) returning sequences, gru(64),
    dropout 0.2, dense to class scores, softmax.
    """
    rng = None if seed is None else np.random.default_rng(seed)

    def draw(*shape):
        if rng is None:
            return np.zeros(shape)
        return rng.normal(0.0, 0.05, size=shape)

    def gru_weights(units, in_dim):
        return {
            "W": draw(3, units, units),
            "U": draw(3, units, in_dim),
            "b": draw(3, units),
        }

    n_classes = len(tuple(class_names))
    layers = (
        LayerSpec(
            "conv1d",
            {"activation": "relu"},
            {"kernel": draw(64, input_channels, 32), "bias": draw(32)},
        ),
        LayerSpec(
            "conv1d",
            {"activation": "relu"},
            {"kernel": draw(64, 32, 128), "bias": draw(128)},
        ),
        LayerSpec("dropout", {"rate": 0.07}),
        LayerSpec("maxpool1d", {"pool": 2, "stride": 2}),
        LayerSpec("gru", {"units": 64, "return_sequences": True}, gru_weights(64, 128)),
        LayerSpec("gru", {"units": 64, "return_sequences": False}, gru_weights(64, 64)),
        LayerSpec("dropout", {"rate": 0.2}),
        LayerSpec(
            "dense",
            {"activation": "softmax"},
            {"weights": draw(n_classes, 64), "bias": draw(n_classes)},
        ),
    )
    return WeightsBundle(
        layers=layers,
        class_names=tuple(class_names),
        input_len=input_len,
        input_channels=input_channels,
    )


@dataclass(frozen=True, eq=False)
class CentroidModel:
    """Nearest-centroid classifier over extracted feature vectors.

    scale, when present, holds per-feature divisors so the distance is
    standardized Euclidean; without it, feature units with large noise
    variance (peak spacings in ms) would drown out the stable ones.
    """

    class_names: tuple[str, ...]
    centroids: np.ndarray
    layout: str
    scale: np.ndarray | None = None

    def __post_init__(self):
        centroids = np.asarray(self.centroids, dtype=np.float64)
        object.__setattr__(self, "centroids", centroids)
        if centroids.ndim != 2 or centroids.shape[0] != len(self.class_names):
            raise ValueError(
                f"{len(self.class_names)} classes but centroid matrix is {centroids.shape}"
            )
        if self.scale is not None:
            scale = np.asarray(self.scale, dtype=np.float64)
            object.__setattr__(self, "scale", scale)
            if scale.shape != (centroids.shape[1],):
                raise ValueError(f"scale shape {scale.shape} != feature width")
            if not np.all(scale > 0):
                raise ValueError("scale values must be positive")

    def classify(self, features: np.ndarray) -> str:
        features = np.asarray(features, dtype=np.float64)
        if features.shape != (self.centroids.shape[1],):
            raise ValueError(
                f"feature vector {features.shape} != centroid width "
                f"{self.centroids.shape[1]}"
            )
        delta = self.centroids - features
        if self.scale is not None:
            delta = delta / self.scale
        dist = np.linalg.norm(delta, axis=1)
        best = np.flatnonzero(dist == dist.min())
        return min(self.class_names[i] for i in best)


def centroid_classify(model: CentroidModel, matrix: np.ndarray) -> list[str]:
    return [model.classify(row) for row in np.asarray(matrix, dtype=np.float64)]


def save_centroids(path: str | Path, model: CentroidModel) -> None:
    doc = {
        "format": CENTROID_FORMAT,
        "layout": model.layout,
        "class_names": list(model.class_names),
        "centroids": model.centroids.tolist(),
        "scale": None if model.scale is None else model.scale.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_centroids(path: str | Path) -> CentroidModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != CENTROID_FORMAT:
        raise BundleError(f"unsupported centroid format {doc.get('format')!r}")
    scale = doc.get("scale")
    return CentroidModel(
        class_names=tuple(doc["class_names"]),
        centroids=np.asarray(doc["centroids"], dtype=np.float64),
        layout=doc["layout"],
        scale=None if scale is None else np.asarray(scale, dtype=np.float64),
    )
