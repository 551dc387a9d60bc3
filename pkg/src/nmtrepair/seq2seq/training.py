"""Teacher-forced NLL training with bucketed batches and checkpoint selection."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .model import EOS, PAD, SOS, Seq2SeqModel

logger = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class Checkpoint:
    params: dict = field(repr=False)
    epoch: int
    val_loss: float
    train_loss: float
    step: int = 0
    learning_rate: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.val_loss):
            raise ValueError("checkpoint validation loss must be finite")


def make_batch(pairs):
    """Pad a list of (src_ids, tgt_ids) into the arrays used by the model."""
    B = len(pairs)
    src_len = np.array([len(s) for s, _ in pairs])
    T = int(src_len.max())
    U = max(len(t) for _, t in pairs) + 1
    src = np.full((B, T), PAD, dtype=np.int64)
    tgt_in = np.full((B, U), PAD, dtype=np.int64)
    tgt_out = np.full((B, U), PAD, dtype=np.int64)
    mask = np.zeros((B, U))
    for b, (s, t) in enumerate(pairs):
        src[b, :len(s)] = s
        tgt_in[b, 0] = SOS
        tgt_in[b, 1:len(t) + 1] = t
        tgt_out[b, :len(t)] = t
        tgt_out[b, len(t)] = EOS
        mask[b, :len(t) + 1] = 1.0
    return src, src_len, tgt_in, tgt_out, mask


def bucket_batches(pairs, bucket_spec, batch_size, rng=None):
    """Group pair indices by source-length bucket and chunk into batches.

    Sources longer than the last bucket share an overflow bucket.  With an
    ``rng`` the order inside buckets and the batch order are shuffled.
    """
    groups = {}
    for i, (s, _) in enumerate(pairs):
        key = next((k for k, limit in enumerate(bucket_spec) if len(s) <= limit), len(bucket_spec))
        groups.setdefault(key, []).append(i)
    batches = []
    for key in sorted(groups):
        idx = np.array(groups[key])
        if rng is not None:
            idx = rng.permutation(idx)
        batches.extend(idx[i:i + batch_size].tolist() for i in range(0, len(idx), batch_size))
    if rng is not None:
        order = rng.permutation(len(batches))
        batches = [batches[i] for i in order]
    return batches


def corpus_loss(model, pairs, batch_size=64, bucket_spec=(10, 20, 30, 40, 50)):
    """Mean per-token NLL (EOS included) of ``pairs`` under ``model``."""
    if not pairs:
        return float("nan")
    total, tokens = 0.0, 0
    for batch in bucket_batches(pairs, bucket_spec, batch_size):
        arrays = make_batch([pairs[i] for i in batch])
        loss, _ = model.loss_and_grads(*arrays, need_grads=False)
        total += loss
        tokens += int(arrays[4].sum())
    return total / tokens


def _clip(grads, max_norm):
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm and norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


class _Adam:
    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.b1, self.b2, self.eps, self.t = beta1, beta2, eps, 0

    def update(self, params, grads, lr):
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k, g in grads.items():
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * g * g
            params[k] -= (lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)).astype(params[k].dtype)


def _as_id_pairs(data, vocabulary):
    out = []
    for pair in data:
        if isinstance(pair, tuple) and len(pair) == 2 and not hasattr(pair, "buggy"):
            src, tgt = pair
        else:
            src, tgt = pair.buggy, pair.fixed
        if vocabulary is not None:
            src, tgt = vocabulary.encode(src), vocabulary.encode(tgt)
        out.append((list(src), list(tgt)))
    return out


def train(model, bundle, config=None, seed=0, eval_every=1, callback=None):
    """Train ``model`` in place and return one checkpoint per evaluation.

    ``bundle`` needs ``train`` and ``validation`` sequences of pairs (with
    ``.buggy``/``.fixed`` token sequences, or ``(src_ids, tgt_ids)`` tuples)
    and a ``vocabulary`` with ``encode`` (may be None for id tuples).
    ``config`` defaults to ``model.config``; its budget is ``max_epochs``
    passes, optionally cut short by ``max_steps`` updates.
    """
    cfg = config or model.config
    vocab = getattr(bundle, "vocabulary", None)
    train_pairs = _as_id_pairs(bundle.train, vocab)
    val_pairs = _as_id_pairs(getattr(bundle, "validation", ()) or (), vocab)
    if not train_pairs:
        raise ValueError("training split is empty")
    rng = np.random.default_rng(seed)
    lr = float(cfg.learning_rate)
    adam = _Adam(model.params) if cfg.optimizer == "adam" else None
    best_val = math.inf
    checkpoints = []
    step = 0
    for epoch in range(1, cfg.max_epochs + 1):
        total, tokens = 0.0, 0
        stop = False
        for batch in bucket_batches(train_pairs, cfg.bucket_spec, cfg.batch_size, rng):
            arrays = make_batch([train_pairs[i] for i in batch])
            loss, grads = model.loss_and_grads(*arrays)
            if not math.isfinite(loss):
                raise TrainingDiverged(
                    f"loss became {loss} at epoch {epoch}, step {step}; "
                    f"lower the learning rate (currently {lr:g}) or the clip norm ({cfg.clip_norm:g})")
            total += loss
            tokens += int(arrays[4].sum())
            n = len(batch)
            for g in grads.values():
                g /= n
            _clip(grads, cfg.clip_norm)
            if lr != 0.0:
                if adam is not None:
                    adam.update(model.params, grads, lr)
                else:
                    for k, g in grads.items():
                        model.params[k] -= (lr * g).astype(model.params[k].dtype)
            step += 1
            if cfg.max_steps is not None and step >= cfg.max_steps:
                stop = True
                break
        if epoch % eval_every == 0 or stop or epoch == cfg.max_epochs:
            train_loss = total / max(tokens, 1)
            val_loss = corpus_loss(model, val_pairs, cfg.batch_size, cfg.bucket_spec) if val_pairs else train_loss
            if not math.isfinite(val_loss) or not model.all_finite():
                raise TrainingDiverged(
                    f"non-finite validation loss at epoch {epoch}; "
                    f"lower the learning rate (currently {lr:g})")
            checkpoints.append(Checkpoint(model.copy_params(), epoch, val_loss, train_loss, step, lr))
            logger.info("epoch=%d step=%d train_loss=%.6f val_loss=%.6f lr=%g",
                        epoch, step, train_loss, val_loss, lr)
            if callback is not None:
                callback(checkpoints[-1])
            if val_loss >= best_val:
                lr *= cfg.lr_decay
            best_val = min(best_val, val_loss)
        if stop:
            break
    return checkpoints


def select_best(checkpoints):
    """Checkpoint with the lowest validation loss; earliest epoch on ties."""
    checkpoints = list(checkpoints)
    if not checkpoints:
        raise ValueError("no checkpoints to select from")
    return min(checkpoints, key=lambda c: (c.val_loss, c.epoch))


def grid_search(bundle, grid, seed=0, **train_kwargs):
    """Train each configuration; return (best config, its best checkpoint).

    Configurations are compared on the validation loss of their own best
    checkpoint; the earlier configuration in ``grid`` wins ties.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty configuration grid")
    best = None
    for i, cfg in enumerate(grid):
        vocab = getattr(bundle, "vocabulary", None)
        if vocab is not None and cfg.vocabulary_size != len(vocab):
            cfg = replace(cfg, vocabulary_size=len(vocab))
        model = Seq2SeqModel(cfg, seed=seed)
        ckpt = select_best(train(model, bundle, cfg, seed=seed, **train_kwargs))
        logger.info("grid config %d: val_loss=%.6f", i, ckpt.val_loss)
        if best is None or ckpt.val_loss < best[1].val_loss:
            best = (cfg, ckpt)
    return best
