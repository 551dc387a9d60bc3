"""Bidirectional recurrent encoder + attention decoder, in numpy.

Shapes: B batch, T source length, H hidden units, E embedding size,
V vocabulary size.  Encoder states are ``[forward; backward]`` (2H).  At
every decoder step the previous top-layer state queries the encoder states,
the resulting context is fed to the first decoder layer together with the
previous token's embedding, and ``[output; context]`` is projected to
vocabulary logits.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .cells import get_cell

PAD, SOS, EOS = 0, 1, 2
ALLOWED_LAYERS = (1, 2, 4)
SMALL_BUCKETS = (10, 20, 30, 40, 50)
MEDIUM_BUCKETS = (60, 80, 100)


@dataclass
class ModelConfig:
    """Architecture and training budget of one encoder-decoder model."""

    cell_kind: str = "lstm"
    encoder_layers: int = 1
    decoder_layers: int = 2
    hidden_units: int = 256
    embedding_dim: int = 512
    vocabulary_size: int = 0
    max_epochs: int = 30
    bucket_spec: tuple = SMALL_BUCKETS
    attention: str = "additive"
    learning_rate: float = 1.0
    lr_decay: float = 0.5
    batch_size: int = 32
    clip_norm: float = 5.0
    max_steps: int | None = None
    init_scale: float = 0.1
    optimizer: str = "sgd"
    dtype: str = "float32"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.bucket_spec = tuple(self.bucket_spec)
        self.cell_kind = self.cell_kind.lower()
        get_cell(self.cell_kind)
        for name in ("encoder_layers", "decoder_layers"):
            if getattr(self, name) not in ALLOWED_LAYERS:
                raise ValueError(f"{name} must be one of {ALLOWED_LAYERS}, got {getattr(self, name)}")
        for name in ("hidden_units", "embedding_dim", "max_epochs", "batch_size"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value <= 0:
                raise ValueError(f"{name} must be a positive int, got {value!r}")
        if self.vocabulary_size < 0:
            raise ValueError("vocabulary_size must be non-negative")
        if self.attention not in ("additive", "multiplicative"):
            raise ValueError(f"unknown attention {self.attention!r}")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")

    def to_dict(self):
        d = asdict(self)
        d["bucket_spec"] = list(self.bucket_spec)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    def digest(self):
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


# the best configuration found by the original hyperparameter search
PAPER_BEST = dict(cell_kind="lstm", encoder_layers=1, decoder_layers=2, hidden_units=256, embedding_dim=512)


def reference_grid(vocabulary_size, **overrides):
    """Ten configurations over cell kind, depth, width and embedding size."""
    rows = [
        ("lstm", 1, 2, 256, 512),
        ("lstm", 1, 1, 256, 256),
        ("lstm", 2, 2, 256, 256),
        ("lstm", 2, 2, 512, 512),
        ("lstm", 4, 4, 256, 256),
        ("gru", 1, 2, 256, 512),
        ("gru", 1, 1, 256, 256),
        ("gru", 2, 2, 512, 512),
        ("gru", 4, 4, 256, 256),
        ("lstm", 1, 4, 512, 512),
    ]
    return [
        ModelConfig(cell_kind=c, encoder_layers=e, decoder_layers=d, hidden_units=h,
                    embedding_dim=emb, vocabulary_size=vocabulary_size, **overrides)
        for c, e, d, h, emb in rows
    ]


@dataclass
class EncoderStates:
    """Encoder output for a batch: states (B, T, 2H) and mask (B, T)."""

    states: np.ndarray
    mask: np.ndarray
    summary: np.ndarray
    keys: np.ndarray | None = None
    caches: list | None = None

    def __len__(self):
        return self.states.shape[1]

    def repeat(self, n):
        """Broadcast a single-sequence encoding to ``n`` decoder rows."""
        keys = None if self.keys is None else np.repeat(self.keys, n, axis=0)
        return EncoderStates(np.repeat(self.states, n, axis=0), np.repeat(self.mask, n, axis=0),
                             np.repeat(self.summary, n, axis=0), keys)


def softmax(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))


def masked_softmax(scores, mask):
    scores = np.where(mask > 0, scores, -np.inf)
    top = scores.max(axis=1, keepdims=True)
    e = np.exp(scores - top) * mask
    return e / e.sum(axis=1, keepdims=True)


class Seq2SeqModel:
    """Parameters plus the forward/backward computations of the model."""

    def __init__(self, config, params=None, seed=0):
        self.config = config
        self.cell = get_cell(config.cell_kind)
        self.dtype = np.dtype(config.dtype)
        if config.vocabulary_size <= EOS:
            raise ValueError("vocabulary_size must cover the PAD/SOS/EOS specials")
        self.params = params if params is not None else self._init_params(np.random.default_rng(seed))
        self._check_shapes()

    # -- parameters ----------------------------------------------------------
    def _init_params(self, rng):
        cfg, dt = self.config, self.dtype
        V, E, H, s = cfg.vocabulary_size, cfg.embedding_dim, cfg.hidden_units, cfg.init_scale
        p = {
            "src_emb": rng.uniform(-s, s, (V, E)).astype(dt),
            "tgt_emb": rng.uniform(-s, s, (V, E)).astype(dt),
        }
        for layer in range(cfg.encoder_layers):
            n_in = E if layer == 0 else 2 * H
            for d in "fb":
                p.update(self.cell.init_params(rng, f"enc{layer}{d}_", n_in, H, s, dt))
        for layer in range(cfg.decoder_layers):
            p[f"bridge{layer}_W"] = rng.uniform(-s, s, (2 * H, H)).astype(dt)
            p[f"bridge{layer}_b"] = np.zeros(H, dtype=dt)
            n_in = E + 2 * H if layer == 0 else H
            p.update(self.cell.init_params(rng, f"dec{layer}_", n_in, H, s, dt))
        if cfg.attention == "additive":
            p["att_W"] = rng.uniform(-s, s, (H, H)).astype(dt)
            p["att_U"] = rng.uniform(-s, s, (2 * H, H)).astype(dt)
            p["att_v"] = rng.uniform(-s, s, H).astype(dt)
        else:
            p["att_M"] = rng.uniform(-s, s, (H, 2 * H)).astype(dt)
        p["out_W"] = rng.uniform(-s, s, (3 * H, V)).astype(dt)
        p["out_b"] = np.zeros(V, dtype=dt)
        return p

    def _check_shapes(self):
        expected = self._init_params(np.random.default_rng(0))
        if set(expected) != set(self.params):
            raise ValueError(f"parameter names mismatch: {sorted(set(expected) ^ set(self.params))}")
        for k, v in expected.items():
            if self.params[k].shape != v.shape:
                raise ValueError(f"parameter {k} has shape {self.params[k].shape}, expected {v.shape}")
            self.params[k] = np.asarray(self.params[k], dtype=self.dtype)

    def groups(self):
        """Parameter names grouped by component (for gradient checks)."""
        out = {}
        for name in self.params:
            if name.startswith("enc"):
                key = "encoder"
            elif name.startswith("dec"):
                key = "decoder"
            elif name.startswith("att"):
                key = "attention"
            elif name.startswith("out"):
                key = "projection"
            elif name.startswith("bridge"):
                key = "bridge"
            else:
                key = "embedding"
            out.setdefault(key, []).append(name)
        return out

    def copy_params(self):
        return {k: v.copy() for k, v in self.params.items()}

    def all_finite(self):
        return all(np.all(np.isfinite(v)) for v in self.params.values())

    # -- encoder -------------------------------------------------------------
    def _check_ids(self, ids):
        ids = np.asarray(ids)
        if ids.size and (ids.min() < 0 or ids.max() >= self.config.vocabulary_size):
            raise IndexError(f"token index out of range [0, {self.config.vocabulary_size})")
        return ids

    def encode_batch(self, src, lengths, keep_caches=False):
        """Encode a padded batch ``src`` (B, T) of token ids."""
        p, cfg = self.params, self.config
        src = self._check_ids(src)
        B, T = src.shape
        H = cfg.hidden_units
        mask = (np.arange(T)[None, :] < np.asarray(lengths)[:, None]).astype(self.dtype)
        x = p["src_emb"][src]
        caches = []
        final_f = final_b = None
        for layer in range(cfg.encoder_layers):
            out = np.zeros((B, T, 2 * H), dtype=self.dtype)
            layer_cache = {"f": [None] * T, "b": [None] * T}
            state = self.cell.zero_state(B, H, self.dtype)
            for t in range(T):
                state, c = self.cell.forward(p, f"enc{layer}f_", x[:, t], state, mask[:, t:t + 1])
                out[:, t, :H] = state[0]
                layer_cache["f"][t] = c
            final_f = state[0]
            state = self.cell.zero_state(B, H, self.dtype)
            for t in range(T - 1, -1, -1):
                state, c = self.cell.forward(p, f"enc{layer}b_", x[:, t], state, mask[:, t:t + 1])
                out[:, t, H:] = state[0]
                layer_cache["b"][t] = c
            final_b = state[0]
            if keep_caches:
                caches.append(layer_cache)
            x = out
        summary = np.concatenate([final_f, final_b], axis=1)
        enc = EncoderStates(x, mask, summary, caches=caches if keep_caches else None)
        if cfg.attention == "additive":
            enc.keys = x @ p["att_U"]
        return enc

    def encode(self, ids):
        """Encode one token-id sequence; ``states`` has shape (n, 2H)."""
        ids = self._check_ids(ids)
        if ids.ndim != 1 or ids.size == 0:
            raise ValueError("encode expects a non-empty 1-d id sequence")
        return self.encode_batch(ids[None, :], [len(ids)])

    # -- decoder -------------------------------------------------------------
    def init_state(self, enc):
        p, cfg = self.params, self.config
        state = []
        for layer in range(cfg.decoder_layers):
            h = np.tanh(enc.summary @ p[f"bridge{layer}_W"] + p[f"bridge{layer}_b"])
            if self.cell.gates == 4:
                state.append((h, np.zeros_like(h)))
            else:
                state.append((h,))
        return state

    def attend(self, query, enc):
        """Attention weights (B, T) and context (B, 2H) for ``query`` (B, H)."""
        p = self.params
        if self.config.attention == "additive":
            act = np.tanh((query @ p["att_W"])[:, None, :] + enc.keys)
            scores = act @ p["att_v"]
        else:
            qm = query @ p["att_M"]
            scores = np.einsum("bd,btd->bt", qm, enc.states)
            act = qm
        weights = masked_softmax(scores, enc.mask)
        context = np.einsum("bt,btd->bd", weights, enc.states)
        return weights, context, act

    def _step(self, state, prev_tokens, enc):
        p, cfg = self.params, self.config
        query = state[-1][0]
        weights, context, act = self.attend(query, enc)
        x = np.concatenate([p["tgt_emb"][prev_tokens], context], axis=1)
        new_state, caches = [], []
        for layer in range(cfg.decoder_layers):
            s, c = self.cell.forward(p, f"dec{layer}_", x, state[layer])
            new_state.append(s)
            caches.append(c)
            x = s[0]
        feat = np.concatenate([x, context], axis=1)
        logits = feat @ p["out_W"] + p["out_b"]
        cache = (query, weights, context, act, caches, feat, prev_tokens)
        return logits, new_state, cache

    def decode_step(self, state, previous_token, enc):
        """One decoder step.

        Returns (next-token distribution, new state, attention weights); all
        arrays keep the leading batch dimension of ``state``.
        """
        prev = self._check_ids(np.atleast_1d(previous_token))
        logits, new_state, cache = self._step(state, prev, enc)
        return softmax(logits), new_state, cache[1]

    def step_log_probs(self, state, prev_tokens, enc):
        logits, new_state, cache = self._step(state, np.asarray(prev_tokens), enc)
        return log_softmax(logits), new_state, cache[1]

    # -- training objective -------------------------------------------------
    def loss_and_grads(self, src, src_len, tgt_in, tgt_out, tgt_mask, need_grads=True):
        """Teacher-forced NLL summed over the batch, and its gradients.

        ``tgt_in`` starts with SOS; ``tgt_out`` is the target shifted by one
        and ends with EOS; ``tgt_mask`` zeroes padded steps.
        """
        p, cfg = self.params, self.config
        H, E = cfg.hidden_units, cfg.embedding_dim
        enc = self.encode_batch(src, src_len, keep_caches=need_grads)
        state = self.init_state(enc)
        init_state = state
        B, U = tgt_in.shape
        loss = 0.0
        step_caches = []
        dlogits_all = []
        tgt_mask = np.asarray(tgt_mask, dtype=self.dtype)
        for t in range(U):
            logits, state, cache = self._step(state, tgt_in[:, t], enc)
            logp = log_softmax(logits)
            m = tgt_mask[:, t]
            loss -= float((logp[np.arange(B), tgt_out[:, t]] * m).sum())
            if need_grads:
                dl = np.exp(logp)
                dl[np.arange(B), tgt_out[:, t]] -= 1.0
                dlogits_all.append(dl * m[:, None])
                step_caches.append(cache)
        if not need_grads:
            return loss, None

        grads = {k: np.zeros_like(v) for k, v in p.items()}
        dstates = np.zeros_like(enc.states)
        dkeys = np.zeros_like(enc.keys) if enc.keys is not None else None
        dstate = [tuple(np.zeros((B, H), dtype=self.dtype) for _ in s) for s in init_state]
        for t in range(U - 1, -1, -1):
            query, weights, context, act, caches, feat, prev = step_caches[t]
            dl = dlogits_all[t]
            grads["out_W"] += feat.T @ dl
            grads["out_b"] += dl.sum(axis=0)
            dfeat = dl @ p["out_W"].T
            dx = dfeat[:, :H]
            dcontext = dfeat[:, H:].copy()
            new_dstate = [None] * cfg.decoder_layers
            for layer in range(cfg.decoder_layers - 1, -1, -1):
                ds = list(dstate[layer])
                ds[0] = ds[0] + dx
                dx, dprev = self.cell.backward(p, f"dec{layer}_", grads, tuple(ds), caches[layer])
                new_dstate[layer] = dprev
            np.add.at(grads["tgt_emb"], prev, dx[:, :E])
            dcontext += dx[:, E:]
            dquery = self._attend_backward(query, weights, act, dcontext, enc, grads, dstates, dkeys)
            top = list(new_dstate[-1])
            top[0] = top[0] + dquery
            new_dstate[-1] = tuple(top)
            dstate = new_dstate

        dsummary = np.zeros_like(enc.summary)
        for layer in range(cfg.decoder_layers):
            h0 = init_state[layer][0]
            dpre = dstate[layer][0] * (1 - h0 * h0)
            grads[f"bridge{layer}_W"] += enc.summary.T @ dpre
            grads[f"bridge{layer}_b"] += dpre.sum(axis=0)
            dsummary += dpre @ p[f"bridge{layer}_W"].T
        if dkeys is not None:
            grads["att_U"] += np.einsum("btd,bta->da", enc.states, dkeys)
            dstates += dkeys @ p["att_U"].T
        self._encoder_backward(src, enc, dstates, dsummary, grads)
        return loss, grads

    def _attend_backward(self, query, weights, act, dcontext, enc, grads, dstates, dkeys):
        p = self.params
        dstates += weights[:, :, None] * dcontext[:, None, :]
        dweights = np.einsum("bd,btd->bt", dcontext, enc.states)
        dscores = weights * (dweights - (weights * dweights).sum(axis=1, keepdims=True))
        if self.config.attention == "additive":
            grads["att_v"] += np.einsum("bt,bta->a", dscores, act)
            dpre = dscores[:, :, None] * p["att_v"][None, None, :] * (1 - act * act)
            dq_proj = dpre.sum(axis=1)
            grads["att_W"] += query.T @ dq_proj
            dkeys += dpre
            return dq_proj @ p["att_W"].T
        qm = act
        dqm = np.einsum("bt,btd->bd", dscores, enc.states)
        dstates += dscores[:, :, None] * qm[:, None, :]
        grads["att_M"] += query.T @ dqm
        return dqm @ p["att_M"].T

    def _encoder_backward(self, src, enc, dstates, dsummary, grads):
        p, cfg = self.params, self.config
        H = cfg.hidden_units
        B, T = src.shape
        dout = dstates
        dfinal_f, dfinal_b = dsummary[:, :H], dsummary[:, H:]
        for layer in range(cfg.encoder_layers - 1, -1, -1):
            cache = enc.caches[layer]
            n_in = cfg.embedding_dim if layer == 0 else 2 * H
            dx = np.zeros((B, T, n_in), dtype=self.dtype)
            dstate = self._zero_dstate(B, dfinal_f)
            for t in range(T - 1, -1, -1):
                ds = list(dstate)
                ds[0] = ds[0] + dout[:, t, :H]
                dxt, dstate = self.cell.backward(p, f"enc{layer}f_", grads, tuple(ds), cache["f"][t])
                dx[:, t] += dxt
            dstate = self._zero_dstate(B, dfinal_b)
            for t in range(T):
                ds = list(dstate)
                ds[0] = ds[0] + dout[:, t, H:]
                dxt, dstate = self.cell.backward(p, f"enc{layer}b_", grads, tuple(ds), cache["b"][t])
                dx[:, t] += dxt
            dout = dx
            dfinal_f = np.zeros((B, H), dtype=self.dtype)
            dfinal_b = np.zeros((B, H), dtype=self.dtype)
        np.add.at(grads["src_emb"], src, dout)

    def _zero_dstate(self, B, dh):
        if self.cell.gates == 4:
            return (dh.copy(), np.zeros_like(dh))
        return (dh.copy(),)
