"""Character-level recurrent classifier, implemented from scratch on numpy.

The model reads a form one symbol at a time through stacked LSTM layers
and predicts a class label from the final hidden state. Gender enters as
the initial hidden state of the first layer (a learned embedding per
gender; the other layers start at zero). Etymology, when used, enters as
an extra input symbol appended after the form.

Everything is float64. Losses and gradients are expressed in bits, so a
model that matches the empirical conditional distribution has a loss
equal to the plug-in conditional entropy and the cross-entropy reads
directly as an upper bound on it.

Sequences are padded at the end. Masked steps copy the previous hidden
and cell state through unchanged, so padding can never alter the output
and pad embeddings receive exactly zero gradient.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import NonFiniteLoss, ShapeMismatch, UnknownLabel
from .lexicon import Instance

PAD = "<pad>"
UNK = "<unk>"
ETYM_TOKENS = {"semitic": "<etym:sem>", "non_semitic": "<etym:non>"}

LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class Vocabulary:
    """Symbol-to-id table: pad, unknown, the two etymology markers, then
    the alphabet in sorted order."""

    symbols: tuple[str, ...]
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})
        if self.symbols[:4] != (PAD, UNK, ETYM_TOKENS["semitic"], ETYM_TOKENS["non_semitic"]):
            raise ShapeMismatch("vocabulary must start with the reserved symbols")

    @classmethod
    def from_instances(cls, instances) -> "Vocabulary":
        alphabet = sorted({sym for inst in instances for sym in inst.form_symbols})
        reserved = (PAD, UNK, ETYM_TOKENS["semitic"], ETYM_TOKENS["non_semitic"])
        return cls(symbols=reserved + tuple(alphabet))

    def __len__(self):
        return len(self.symbols)

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def unk_id(self) -> int:
        return 1

    def encode_symbols(self, symbols, etymology=None) -> list[int]:
        ids = [self._index.get(s, self.unk_id) for s in symbols]
        if etymology is not None:
            try:
                ids.append(self._index[ETYM_TOKENS[etymology]])
            except KeyError:
                raise UnknownLabel(f"unknown etymology {etymology!r}") from None
        return ids


@dataclass(frozen=True)
class ModelConfig:
    char_embedding_dim: int = 32
    hidden_dims: tuple[int, ...] = (64,)
    epochs: int = 20
    learning_rate: float = 1e-3
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))
        if self.char_embedding_dim < 1 or any(h < 1 for h in self.hidden_dims):
            raise ShapeMismatch("embedding and hidden sizes must be positive")
        if not self.hidden_dims:
            raise ShapeMismatch("at least one recurrent layer is required")


@dataclass
class EncodedData:
    """Padded integer batch form of an instance list."""

    X: np.ndarray          # (N, T) int64 symbol ids, pad-id on the right
    mask: np.ndarray       # (N, T) float64, 1 on real symbols
    gender: np.ndarray     # (N,) int64 gender index
    y: np.ndarray          # (N,) int64 label index

    def __len__(self):
        return self.X.shape[0]

    def take(self, idx) -> "EncodedData":
        return EncodedData(self.X[idx], self.mask[idx], self.gender[idx], self.y[idx])


def encode_dataset(
    instances,
    vocab: Vocabulary,
    genders: tuple[str, ...],
    labels: tuple[str, ...],
    with_etymology: bool = False,
) -> EncodedData:
    gender_ix = {g: i for i, g in enumerate(genders)}
    label_ix = {lab: i for i, lab in enumerate(labels)}

    rows = []
    for inst in instances:
        ety = inst.etymology if with_etymology else None
        rows.append(vocab.encode_symbols(inst.form_symbols, etymology=ety))
    t_max = max((len(r) for r in rows), default=1)

    n = len(rows)
    X = np.full((n, t_max), vocab.pad_id, dtype=np.int64)
    mask = np.zeros((n, t_max), dtype=np.float64)
    gender = np.zeros(n, dtype=np.int64)
    y = np.zeros(n, dtype=np.int64)
    for i, (inst, ids) in enumerate(zip(instances, rows)):
        X[i, : len(ids)] = ids
        mask[i, : len(ids)] = 1.0
        try:
            gender[i] = gender_ix[inst.gender]
        except KeyError:
            raise UnknownLabel(f"gender {inst.gender!r} not in model gender set") from None
        try:
            y[i] = label_ix[inst.label]
        except KeyError:
            raise UnknownLabel(f"label {inst.label!r} not in model label set") from None
    return EncodedData(X=X, mask=mask, gender=gender, y=y)


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


class ClassifierModel:
    """Stacked LSTM over symbol ids with a softmax readout.

    Parameters are created in a fixed order (char embeddings, gender
    embeddings, then W_x/W_h/b per layer, then the readout) from a seeded
    generator, uniform on [-0.1, 0.1], after which each layer's forget
    gate bias is set to 1.0. Gate order along the 4H axis is i, f, g, o.
    """

    def __init__(self, config: ModelConfig, vocab: Vocabulary,
                 genders: tuple[str, ...], labels: tuple[str, ...]):
        self.config = config
        self.vocab = vocab
        self.genders = tuple(genders)
        self.labels = tuple(labels)
        self.rng = np.random.default_rng(config.seed)

        d = config.char_embedding_dim
        dims = config.hidden_dims
        self.params: dict[str, np.ndarray] = {}

        def u(shape):
            return self.rng.uniform(-0.1, 0.1, size=shape)

        self.params["E_char"] = u((len(vocab), d))
        self.params["E_gender"] = u((len(self.genders), dims[0]))
        in_dim = d
        for l, h in enumerate(dims):
            self.params[f"W_x{l}"] = u((in_dim, 4 * h))
            self.params[f"W_h{l}"] = u((h, 4 * h))
            b = u(4 * h)
            b[h: 2 * h] = 1.0  # forget gate starts open
            self.params[f"b{l}"] = b
            in_dim = h
        self.params["W_out"] = u((dims[-1], len(self.labels)))
        self.params["b_out"] = u(len(self.labels))

        self._adam_m = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_v = {k: np.zeros_like(v) for k, v in self.params.items()}
        self._adam_t = 0

    # ---- forward / backward ----

    def _check_batch(self, X, mask, gender):
        if X.shape != mask.shape or X.shape[0] != gender.shape[0]:
            raise ShapeMismatch(
                f"inconsistent batch: X{X.shape} mask{mask.shape} gender{gender.shape}"
            )

    def _forward(self, X, mask, gender):
        """Run the stack; returns per-layer caches for backprop."""
        self._check_batch(X, mask, gender)
        B, T = X.shape
        dims = self.config.hidden_dims

        x_seq = self.params["E_char"][X]  # (B, T, d)
        caches = []
        for l, H in enumerate(dims):
            W_x, W_h, b = (self.params[f"W_x{l}"], self.params[f"W_h{l}"],
                           self.params[f"b{l}"])
            # input projection for every step at once
            zx = x_seq.reshape(B * T, -1) @ W_x
            zx = zx.reshape(B, T, 4 * H) + b

            h = self.params["E_gender"][gender] if l == 0 else np.zeros((B, H))
            c = np.zeros((B, H))
            hs = np.empty((B, T, H))
            cs = np.empty((B, T, H))
            gates = np.empty((B, T, 4 * H))
            h_prevs = np.empty((B, T, H))
            c_prevs = np.empty((B, T, H))
            for t in range(T):
                z = zx[:, t] + h @ W_h
                i = _sigmoid(z[:, :H])
                f = _sigmoid(z[:, H: 2 * H])
                g = np.tanh(z[:, 2 * H: 3 * H])
                o = _sigmoid(z[:, 3 * H:])
                c_new = f * c + i * g
                h_new = o * np.tanh(c_new)
                m = mask[:, t][:, None]
                h_prevs[:, t] = h
                c_prevs[:, t] = c
                # carry state through padded steps unchanged
                c = m * c_new + (1.0 - m) * c
                h = m * h_new + (1.0 - m) * h
                gates[:, t] = np.concatenate([i, f, g, o], axis=1)
                hs[:, t] = h
                cs[:, t] = c
            caches.append({
                "x_seq": x_seq, "gates": gates, "hs": hs, "cs": cs,
                "h_prevs": h_prevs, "c_prevs": c_prevs, "h_last": h,
            })
            x_seq = hs

        logits = caches[-1]["h_last"] @ self.params["W_out"] + self.params["b_out"]
        probs = _softmax(logits)
        return probs, caches

    def predict_probs(self, X, mask, gender) -> np.ndarray:
        probs, _ = self._forward(X, mask, gender)
        return probs

    def loss(self, X, mask, gender, y) -> float:
        probs = self.predict_probs(X, mask, gender)
        with np.errstate(divide="ignore"):
            logs = np.log2(probs[np.arange(len(y)), y])
        return float(-logs.mean())

    def loss_and_grads(self, X, mask, gender, y):
        probs, caches = self._forward(X, mask, gender)
        B, T = X.shape
        dims = self.config.hidden_dims

        with np.errstate(divide="ignore"):
            loss = float(-np.log2(probs[np.arange(B), y]).mean())

        grads = {k: np.zeros_like(v) for k, v in self.params.items()}

        # d(mean -log2 p_true)/dlogits, the bits analogue of softmax CE
        dlogits = probs.copy()
        dlogits[np.arange(B), y] -= 1.0
        dlogits /= B * LN2

        h_last = caches[-1]["h_last"]
        grads["W_out"] = h_last.T @ dlogits
        grads["b_out"] = dlogits.sum(axis=0)

        # gradient arriving at each layer's hidden sequence from above
        dh_seq = np.zeros((B, T, dims[-1]))
        dh_seq[:, T - 1] = dlogits @ self.params["W_out"].T

        for l in range(len(dims) - 1, -1, -1):
            H = dims[l]
            cache = caches[l]
            W_x, W_h = self.params[f"W_x{l}"], self.params[f"W_h{l}"]
            gates, cs = cache["gates"], cache["cs"]
            h_prevs, c_prevs = cache["h_prevs"], cache["c_prevs"]

            dZ_seq = np.zeros((B, T, 4 * H))
            dh = np.zeros((B, H))
            dc = np.zeros((B, H))
            for t in range(T - 1, -1, -1):
                dh = dh + dh_seq[:, t]
                m = mask[:, t][:, None]
                i = gates[:, t, :H]
                f = gates[:, t, H: 2 * H]
                g = gates[:, t, 2 * H: 3 * H]
                o = gates[:, t, 3 * H:]
                # undo the mask mix: c_t = m*c_new + (1-m)*c_prev
                c_new = np.where(m > 0, cs[:, t], f * c_prevs[:, t] + i * g)
                tanh_c = np.tanh(c_new)

                dh_new = dh * m
                dh_carry = dh * (1.0 - m)
                dc_new = dc * m
                dc_carry = dc * (1.0 - m)

                do = dh_new * tanh_c
                dc_new = dc_new + dh_new * o * (1.0 - tanh_c ** 2)
                df = dc_new * c_prevs[:, t]
                di = dc_new * g
                dg = dc_new * i
                dc = dc_new * f + dc_carry

                dZ = np.concatenate([
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g ** 2),
                    do * o * (1.0 - o),
                ], axis=1)
                dZ_seq[:, t] = dZ
                dh = dZ @ W_h.T + dh_carry

            x_seq = cache["x_seq"]
            flat_dZ = dZ_seq.reshape(B * T, 4 * H)
            grads[f"W_x{l}"] = x_seq.reshape(B * T, -1).T @ flat_dZ
            grads[f"W_h{l}"] = h_prevs.reshape(B * T, H).T @ flat_dZ
            grads[f"b{l}"] = flat_dZ.sum(axis=0)
            dx_seq = (flat_dZ @ W_x.T).reshape(B, T, -1)

            if l == 0:
                np.add.at(grads["E_char"], X, dx_seq)
                # what is left in dh is d loss / d h_0, the gender embedding
                np.add.at(grads["E_gender"], gender, dh)
            else:
                dh_seq = dx_seq
        return loss, grads

    # ---- optimization ----

    def adam_step(self, grads, lr=None, beta1=0.9, beta2=0.999, eps=1e-8):
        lr = self.config.learning_rate if lr is None else lr
        self._adam_t += 1
        t = self._adam_t
        for k, g in grads.items():
            m = self._adam_m[k]
            v = self._adam_v[k]
            m *= beta1
            m += (1 - beta1) * g
            v *= beta2
            v += (1 - beta2) * g * g
            m_hat = m / (1 - beta1 ** t)
            v_hat = v / (1 - beta2 ** t)
            self.params[k] -= lr * m_hat / (np.sqrt(v_hat) + eps)

    def train_epoch(self, data: EncodedData) -> float:
        order = self.rng.permutation(len(data))
        bs = self.config.batch_size
        total = 0.0
        for start in range(0, len(data), bs):
            idx = order[start: start + bs]
            batch = data.take(idx)
            loss, grads = self.loss_and_grads(batch.X, batch.mask, batch.gender, batch.y)
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"loss {loss} at step {self._adam_t + 1}")
            self.adam_step(grads)
            total += loss * len(idx)
        return total / len(data)

    def fit(self, data: EncodedData) -> list[float]:
        return [self.train_epoch(data) for _ in range(self.config.epochs)]

    def evaluate(self, data: EncodedData, batch_size=512):
        """Mean held-out loss in bits and the full (N, K) probability matrix."""
        probs = np.empty((len(data), len(self.labels)))
        for start in range(0, len(data), batch_size):
            sl = slice(start, start + batch_size)
            probs[sl] = self.predict_probs(data.X[sl], data.mask[sl], data.gender[sl])
        with np.errstate(divide="ignore"):
            loss = float(-np.log2(probs[np.arange(len(data)), data.y]).mean())
        return loss, probs

    # ---- serialization ----

    def to_json(self) -> str:
        payload = {
            "format": "formclass-model",
            "version": 1,
            "config": asdict(self.config),
            "vocab_symbols": list(self.vocab.symbols),
            "genders": list(self.genders),
            "labels": list(self.labels),
            "params": {
                k: {
                    "shape": list(v.shape),
                    "data": base64.b64encode(np.ascontiguousarray(v, dtype="<f8").tobytes()).decode("ascii"),
                }
                for k, v in self.params.items()
            },
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ClassifierModel":
        payload = json.loads(text)
        if payload.get("format") != "formclass-model":
            raise ShapeMismatch("not a model checkpoint")
        cfg = payload["config"]
        cfg["hidden_dims"] = tuple(cfg["hidden_dims"])
        config = ModelConfig(**cfg)
        vocab = Vocabulary(symbols=tuple(payload["vocab_symbols"]))
        model = cls(config, vocab, tuple(payload["genders"]), tuple(payload["labels"]))
        for k, entry in payload["params"].items():
            arr = np.frombuffer(base64.b64decode(entry["data"]), dtype="<f8")
            model.params[k] = arr.reshape(entry["shape"]).copy()
        model._adam_m = {k: np.zeros_like(v) for k, v in model.params.items()}
        model._adam_v = {k: np.zeros_like(v) for k, v in model.params.items()}
        model._adam_t = 0
        return model


def train_model(config, instances, genders, labels, with_etymology=False):
    """Build vocab from the instances, encode, train, return (model, losses)."""
    vocab = Vocabulary.from_instances(instances)
    model = ClassifierModel(config, vocab, genders, labels)
    data = encode_dataset(instances, vocab, genders, labels, with_etymology)
    losses = model.fit(data)
    return model, losses


# ---- gradient checking ----

def finite_difference(loss_fn, param, index, eps=1e-4) -> float:
    """Central difference of loss_fn at one coordinate of param."""
    orig = param[index]
    param[index] = orig + eps
    up = loss_fn()
    param[index] = orig - eps
    down = loss_fn()
    param[index] = orig
    return (up - down) / (2.0 * eps)


def gradient_check(model: ClassifierModel, X, mask, gender, y,
                   n_coords=100, eps=1e-4, rng=None) -> dict[str, float]:
    """Compare analytic gradients to central differences.

    Samples up to n_coords coordinates per tensor and reports, per tensor,
    max_i |analytic_i - numeric_i| scaled by the larger infinity norm of
    the two sampled vectors (floored at 1e-12). Healthy implementations
    sit below 1e-4; a corrupted gradient shows up orders of magnitude
    higher.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    _, grads = model.loss_and_grads(X, mask, gender, y)

    def loss_fn():
        return model.loss(X, mask, gender, y)

    report = {}
    for name, param in model.params.items():
        size = param.size
        take = min(n_coords, size)
        flat_idx = rng.choice(size, size=take, replace=False)
        analytic = np.empty(take)
        numeric = np.empty(take)
        for j, fi in enumerate(flat_idx):
            index = np.unravel_index(int(fi), param.shape)
            analytic[j] = grads[name][index]
            numeric[j] = finite_difference(loss_fn, param, index, eps=eps)
        scale = max(np.abs(analytic).max(initial=0.0),
                    np.abs(numeric).max(initial=0.0), 1e-12)
        report[name] = float(np.abs(analytic - numeric).max(initial=0.0) / scale)
    return report
