"""Multi-layer dictionary learning over frozen word embeddings.

Each layer holds a dictionary matrix ``D`` (one row per latent element) and a
two-layer ReLU kernel network that maps an embedding ``z`` to a non-negative
code ``t``; the embedding is reconstructed as ``D.T @ t``. Layers are trained
jointly but independently on the same embedding batches, minimizing a
three-term loss per layer:

  1. ``||z - sg(D.T) t||_2``   reconstruction, gradient flows to the kernel
  2. ``||z - D.T sg(t)||_2``   reconstruction, gradient flows to the dictionary
  3. ``| t - mean_batch(t) |_1``  sparsity pressure on the codes

``sg`` is the stop-gradient operator: terms 1 and 2 have equal value and the
alternation exists only in the gradients, so dictionary and kernel updates
never see each other's reconstruction term. Norm terms use the plain (not
squared) L2 norm; at a zero residual or an L1/ReLU kink the subgradient 0 is
used.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .embeddings import EmbeddingStore
from .errors import ConfigError, FormatError, ShapeError, TrainingError, TruncatedFileError

PARAM_NAMES = ("D", "W1", "b1", "W2", "b2")

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

CHECKPOINT_MAGIC = b"GSCK"
CHECKPOINT_VERSION = 1
CHECKPOINT_EVERY = 1000


@dataclass
class TrainConfig:
    dict_size: int = 8192
    n_layers: int = 6
    embed_dim: int = 768
    hidden_dim: int | None = None
    lr: float = 1e-5
    batch_size: int = 256
    steps: int = 15000
    l1_weight: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.hidden_dim is None:
            self.hidden_dim = self.embed_dim
        for name in ("dict_size", "n_layers", "embed_dim", "hidden_dim", "batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.lr <= 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if self.steps < 0:
            raise ConfigError(f"steps must be non-negative, got {self.steps}")
        if self.l1_weight < 0:
            raise ConfigError(f"l1_weight must be non-negative, got {self.l1_weight}")


@dataclass
class DictionaryLayer:
    D: np.ndarray   # dict_size × embed_dim, one dictionary element per row
    W1: np.ndarray  # hidden_dim × embed_dim
    b1: np.ndarray  # hidden_dim
    W2: np.ndarray  # dict_size × hidden_dim
    b2: np.ndarray  # dict_size

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    @property
    def dict_size(self) -> int:
        return self.D.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.D.shape[1]


@dataclass
class LayerGrads:
    D: np.ndarray
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}


@dataclass
class LossBreakdown:
    recon_kernel: float  # term 1
    recon_dict: float    # term 2 (equal value, different gradient)
    sparsity: float      # term 3, unweighted
    total: float


@dataclass
class AdamState:
    m: list[dict[str, np.ndarray]]
    v: list[dict[str, np.ndarray]]
    step: int = 0


@dataclass
class ModelState:
    layers: list[DictionaryLayer]
    adam: AdamState
    config: TrainConfig


def init_layer(
    dict_size: int,
    embed_dim: int,
    hidden_dim: int,
    rng: np.random.Generator,
    dtype=np.float32,
) -> DictionaryLayer:
    """Dictionary rows ~ N(0, 1/sqrt(d)); kernel weights Glorot-uniform; zero biases."""
    def glorot(fan_in, fan_out, shape):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-bound, bound, size=shape).astype(dtype)

    return DictionaryLayer(
        D=rng.normal(0.0, 1.0 / np.sqrt(embed_dim), size=(dict_size, embed_dim)).astype(dtype),
        W1=glorot(embed_dim, hidden_dim, (hidden_dim, embed_dim)),
        b1=np.zeros(hidden_dim, dtype=dtype),
        W2=glorot(hidden_dim, dict_size, (dict_size, hidden_dim)),
        b2=np.zeros(dict_size, dtype=dtype),
    )


def init_model(config: TrainConfig, dtype=np.float32) -> ModelState:
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_layers)
    layers = [
        init_layer(
            config.dict_size,
            config.embed_dim,
            config.hidden_dim,
            np.random.Generator(np.random.PCG64(s)),
            dtype=dtype,
        )
        for s in seeds
    ]
    adam = AdamState(
        m=[{n: np.zeros_like(p) for n, p in layer.params().items()} for layer in layers],
        v=[{n: np.zeros_like(p) for n, p in layer.params().items()} for layer in layers],
        step=0,
    )
    return ModelState(layers, adam, config)


def _as_batch(layer: DictionaryLayer, z: np.ndarray) -> tuple[np.ndarray, bool]:
    z = np.asarray(z)
    single = z.ndim == 1
    batch = z[None, :] if single else z
    if batch.ndim != 2 or batch.shape[1] != layer.embed_dim:
        raise ShapeError(
            f"input has shape {z.shape}, expected (..., {layer.embed_dim})"
        )
    return batch, single


def _forward(layer: DictionaryLayer, batch: np.ndarray):
    pre_hidden = batch @ layer.W1.T + layer.b1
    hidden = np.maximum(pre_hidden, 0)
    pre_code = hidden @ layer.W2.T + layer.b2
    codes = np.maximum(pre_code, 0)
    return pre_hidden, hidden, pre_code, codes


def kernel_forward(layer: DictionaryLayer, z: np.ndarray) -> np.ndarray:
    """Code vector t = ReLU(W2 ReLU(W1 z + b1) + b2); accepts a vector or a batch."""
    batch, single = _as_batch(layer, z)
    codes = _forward(layer, batch)[3]
    return codes[0] if single else codes


def reconstruct(layer: DictionaryLayer, t: np.ndarray) -> np.ndarray:
    """Embedding reconstruction D.T @ t; accepts a vector or a batch of codes."""
    t = np.asarray(t)
    single = t.ndim == 1
    codes = t[None, :] if single else t
    if codes.ndim != 2 or codes.shape[1] != layer.dict_size:
        raise ShapeError(f"codes have shape {t.shape}, expected (..., {layer.dict_size})")
    out = codes @ layer.D
    return out[0] if single else out


def _loss_pieces(layer: DictionaryLayer, batch: np.ndarray):
    batch = np.asarray(batch)
    if batch.ndim != 2 or batch.shape[0] < 1:
        raise ValueError(f"batch must be a non-empty 2-d array, got shape {batch.shape}")
    if batch.shape[1] != layer.embed_dim:
        raise ShapeError(
            f"batch has {batch.shape[1]} columns, layer expects {layer.embed_dim}"
        )
    pre_hidden, hidden, pre_code, codes = _forward(layer, batch)
    residual = batch - codes @ layer.D
    norms = np.linalg.norm(residual, axis=1)
    # deviation from the batch-mean code, computed on first-row-shifted values
    # so identical codes give exact zeros
    shifted = codes - codes[0]
    deviation = shifted - shifted.mean(axis=0)
    return pre_hidden, hidden, pre_code, codes, residual, norms, deviation


def dict_loss(layer: DictionaryLayer, batch: np.ndarray, l1_weight: float = 1.0) -> LossBreakdown:
    """Batch-mean three-term loss. Terms 1 and 2 share one value by construction."""
    *_, norms, deviation = _loss_pieces(layer, batch)
    recon = float(norms.mean())
    sparsity = float(np.abs(deviation).sum(axis=1).mean())
    return LossBreakdown(
        recon_kernel=recon,
        recon_dict=recon,
        sparsity=sparsity,
        total=recon + recon + l1_weight * sparsity,
    )


def dict_loss_gradients(
    layer: DictionaryLayer,
    batch: np.ndarray,
    l1_weight: float = 1.0,
    terms: tuple[int, ...] = (1, 2, 3),
) -> LayerGrads:
    """Analytic gradients under stop-gradient masking.

    The dictionary receives gradient only from term 2; the kernel parameters
    only from terms 1 and 3. ``terms`` restricts which loss terms contribute,
    which is how the masking itself is tested.
    """
    pre_hidden, hidden, pre_code, codes, residual, norms, deviation = _loss_pieces(
        layer, batch
    )
    n_rows = batch.shape[0]
    dtype = layer.D.dtype
    # 1/(B*norm) with the zero-residual subgradient handled as 0
    safe = norms > 0
    inv = np.zeros_like(norms)
    inv[safe] = 1.0 / (n_rows * norms[safe])
    scaled_residual = residual * inv[:, None]

    if 2 in terms:
        grad_D = -(codes.T @ scaled_residual)
    else:
        grad_D = np.zeros_like(layer.D)

    grad_codes = np.zeros_like(codes)
    if 1 in terms:
        grad_codes += -(scaled_residual @ layer.D.T)
    if 3 in terms:
        signs = np.sign(deviation)
        grad_codes += (l1_weight / n_rows) * (signs - signs.mean(axis=0))

    grad_pre_code = grad_codes * (pre_code > 0)
    grad_W2 = grad_pre_code.T @ hidden
    grad_b2 = grad_pre_code.sum(axis=0)
    grad_hidden = grad_pre_code @ layer.W2
    grad_pre_hidden = grad_hidden * (pre_hidden > 0)
    grad_W1 = grad_pre_hidden.T @ batch
    grad_b1 = grad_pre_hidden.sum(axis=0)
    return LayerGrads(
        D=grad_D.astype(dtype, copy=False),
        W1=grad_W1.astype(dtype, copy=False),
        b1=grad_b1.astype(dtype, copy=False),
        W2=grad_W2.astype(dtype, copy=False),
        b2=grad_b2.astype(dtype, copy=False),
    )


def adam_step(state: ModelState, grads: list[LayerGrads]) -> ModelState:
    """One Adam update over every layer; mutates and returns ``state``."""
    if len(grads) != len(state.layers):
        raise ValueError(f"got {len(grads)} gradient sets for {len(state.layers)} layers")
    step = state.adam.step + 1
    for layer_grads in grads:
        for name, g in layer_grads.params().items():
            if not np.isfinite(g).all():
                raise TrainingError(f"non-finite gradient in {name}", step=step)
    lr = state.config.lr
    bias1 = 1.0 - ADAM_BETA1**step
    bias2 = 1.0 - ADAM_BETA2**step
    for layer, layer_grads, m, v in zip(state.layers, grads, state.adam.m, state.adam.v):
        for name, param in layer.params().items():
            g = layer_grads.params()[name]
            m[name] *= ADAM_BETA1
            m[name] += (1.0 - ADAM_BETA1) * g
            v[name] *= ADAM_BETA2
            v[name] += (1.0 - ADAM_BETA2) * g * g
            m_hat = m[name] / bias1
            v_hat = v[name] / bias2
            param -= lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
            if not np.isfinite(param).all():
                raise TrainingError(f"non-finite parameter {name} after update", step=step)
    state.adam.step = step
    return state


def train(
    config: TrainConfig,
    embeddings: EmbeddingStore,
    checkpoint_dir: str | Path,
    on_step: Callable[[int, LossBreakdown], None] | None = None,
    checkpoint_extra: dict | None = None,
) -> ModelState:
    """Run ``config.steps`` mini-batch steps over the pooled word vectors.

    Every layer sees the same uniformly sampled batch each step; layers differ
    only by initialization seed. Checkpoints are written every 1000 steps and
    at the end. ``on_step`` receives the per-step loss summed across layers.
    """
    if embeddings.dim != config.embed_dim:
        raise ConfigError(
            f"embedding dim {embeddings.dim} != config embed_dim {config.embed_dim}"
        )
    words = embeddings.word_matrix()
    if config.steps > 0 and words.shape[0] == 0:
        raise ConfigError("embedding store holds no word vectors")

    state = init_model(config)
    batch_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([config.seed, 1]))
    )
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)

    totals: list[float] = []
    for step in range(1, config.steps + 1):
        idx = batch_rng.integers(0, words.shape[0], size=config.batch_size)
        batch = words[idx]
        grads = [
            dict_loss_gradients(layer, batch, l1_weight=config.l1_weight)
            for layer in state.layers
        ]
        losses = [dict_loss(layer, batch, l1_weight=config.l1_weight) for layer in state.layers]
        agg = LossBreakdown(
            recon_kernel=sum(b.recon_kernel for b in losses),
            recon_dict=sum(b.recon_dict for b in losses),
            sparsity=sum(b.sparsity for b in losses),
            total=sum(b.total for b in losses),
        )
        adam_step(state, grads)
        totals.append(agg.total)
        if on_step is not None:
            on_step(step, agg)
        if step % CHECKPOINT_EVERY == 0:
            save_checkpoint(
                state, checkpoint_dir / f"step_{step:06d}.gsck", extra=checkpoint_extra
            )

    if totals:
        first = float(np.mean(totals[:100]))
        last = float(np.mean(totals[-100:]))
        if last > first:
            warnings.warn(
                f"training loss did not decrease (first-100 mean {first:.4g}, "
                f"last-100 mean {last:.4g})",
                stacklevel=2,
            )
    save_checkpoint(state, checkpoint_dir / "final.gsck", extra=checkpoint_extra)
    return state


def _write_array(fh, arr: np.ndarray) -> None:
    fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def _read_array(fh, shape: tuple[int, ...], context: str) -> np.ndarray:
    count = int(np.prod(shape))
    buf = fh.read(4 * count)
    if len(buf) != 4 * count:
        raise TruncatedFileError(f"checkpoint truncated while reading {context}")
    return np.frombuffer(buf, dtype="<f4").reshape(shape).copy()


def _layer_shapes(config: TrainConfig) -> dict[str, tuple[int, ...]]:
    m, d, h = config.dict_size, config.embed_dim, config.hidden_dim
    return {"D": (m, d), "W1": (h, d), "b1": (h,), "W2": (m, h), "b2": (m,)}


def save_checkpoint(state: ModelState, path: str | Path, extra: dict | None = None) -> None:
    """GSCK layout: magic | version u16 | json_len u32 | {config, extra} JSON
    | per-layer params (f32: D, W1, b1, W2, b2) | per-layer Adam m then v in
    the same order | step u64."""
    header = json.dumps(
        {"config": asdict(state.config), "extra": extra or {}},
        sort_keys=True,
        separators=(",", ":"),
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<HI", CHECKPOINT_VERSION, len(header)))
        fh.write(header)
        fh.write(struct.pack("<I", len(state.layers)))
        for layer in state.layers:
            for name in PARAM_NAMES:
                _write_array(fh, layer.params()[name])
        for m, v in zip(state.adam.m, state.adam.v):
            for name in PARAM_NAMES:
                _write_array(fh, m[name])
                _write_array(fh, v[name])
        fh.write(struct.pack("<Q", state.adam.step))


def load_checkpoint(path: str | Path) -> ModelState:
    info, state = _read_checkpoint(path)
    return state


def read_checkpoint_info(path: str | Path) -> dict:
    """Config and provenance JSON stored in a checkpoint header."""
    info, _ = _read_checkpoint(path, header_only=True)
    return info


def _read_checkpoint(path: str | Path, header_only: bool = False):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != CHECKPOINT_MAGIC:
            raise FormatError(f"{path}: bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
        buf = fh.read(6)
        if len(buf) != 6:
            raise TruncatedFileError(f"{path}: checkpoint truncated in header")
        version, header_len = struct.unpack("<HI", buf)
        if version != CHECKPOINT_VERSION:
            raise FormatError(f"{path}: unsupported checkpoint version {version}")
        header = fh.read(header_len)
        if len(header) != header_len:
            raise TruncatedFileError(f"{path}: checkpoint truncated in header JSON")
        info = json.loads(header.decode("utf-8"))
        if header_only:
            return info, None
        config = TrainConfig(**info["config"])
        buf = fh.read(4)
        if len(buf) != 4:
            raise TruncatedFileError(f"{path}: checkpoint truncated before layers")
        (n_layers,) = struct.unpack("<I", buf)
        if n_layers != config.n_layers:
            raise FormatError(
                f"{path}: header says {config.n_layers} layers, file has {n_layers}"
            )
        shapes = _layer_shapes(config)
        layers = []
        for i in range(n_layers):
            arrays = {
                name: _read_array(fh, shapes[name], f"layer {i} {name}")
                for name in PARAM_NAMES
            }
            layers.append(DictionaryLayer(**arrays))
        m_list, v_list = [], []
        for i in range(n_layers):
            m_arrays, v_arrays = {}, {}
            for name in PARAM_NAMES:
                m_arrays[name] = _read_array(fh, shapes[name], f"layer {i} adam m {name}")
                v_arrays[name] = _read_array(fh, shapes[name], f"layer {i} adam v {name}")
            m_list.append(m_arrays)
            v_list.append(v_arrays)
        buf = fh.read(8)
        if len(buf) != 8:
            raise TruncatedFileError(f"{path}: checkpoint truncated before step counter")
        (step,) = struct.unpack("<Q", buf)
        state = ModelState(layers, AdamState(m_list, v_list, step), config)
        return info, state
