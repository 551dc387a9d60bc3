"""Greedy and beam-search decoding of candidate patches."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lexabs import AbstractedMethod, UnmappableId, abstract_method, concretize, tokenize
from .seq2seq.model import EOS, PAD, SOS

_BANNED = (PAD, SOS)


def default_max_len(n_input):
    return 2 * n_input + 10


@dataclass
class Hypothesis:
    tokens: tuple
    log_prob: float
    state: list | None = field(default=None, repr=False)
    complete: bool = False

    def key(self):
        seq = self.tokens + ((EOS,) if self.complete else ())
        return (-self.log_prob, seq)


@dataclass
class PatchSet:
    """Ranked candidates (best first) with their log-probabilities."""

    candidates: list
    scores: list
    complete: list = field(default_factory=list)

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(zip(self.candidates, self.scores))

    def top(self, k):
        return PatchSet(self.candidates[:k], self.scores[:k], self.complete[:k])


def _encode_input(model, source, vocabulary):
    if vocabulary is not None:
        ids = vocabulary.encode(source)
    else:
        ids = list(source)
    if not ids:
        raise ValueError("cannot decode an empty input")
    return model.encode(np.asarray(ids, dtype=np.int64)), len(ids)


def _output(tokens, vocabulary):
    if vocabulary is None:
        return tuple(tokens)
    return AbstractedMethod(tuple(vocabulary.decode(tokens)))


def _stack(states):
    return [tuple(np.concatenate([s[layer][j] for s in states], axis=0) for j in range(len(states[0][layer])))
            for layer in range(len(states[0]))]


def _row(state, i):
    return [tuple(part[i:i + 1] for part in layer) for layer in state]


def _masked(logp):
    logp = logp.copy()
    logp[:, list(_BANNED)] = -np.inf
    return logp


def greedy_decode(model, source, max_len=None, vocabulary=None):
    """Arg-max decoding; ties go to the lowest vocabulary index.

    ``source`` is a token sequence (encoded with ``vocabulary`` when given)
    or a sequence of ids.  The result stops before EOS or after ``max_len``
    tokens.
    """
    enc, n = _encode_input(model, source, vocabulary)
    max_len = default_max_len(n) if max_len is None else max_len
    state = model.init_state(enc)
    prev = np.array([SOS])
    out = []
    for _ in range(max_len):
        logp, state, _ = model.step_log_probs(state, prev, enc)
        tok = int(np.argmax(_masked(logp)[0]))
        if tok == EOS:
            break
        out.append(tok)
        prev = np.array([tok])
    return _output(out, vocabulary)


def beam_decode(model, source, k, max_len=None, vocabulary=None, length_normalize=False):
    """Beam search keeping ``k`` hypotheses.

    Finished hypotheses stay in the beam and compete on score with the live
    ones; the search stops when all beam entries are finished or after
    ``max_len`` steps, at which point live hypotheses are returned as
    truncated candidates.  Pruning ties are broken by the lexicographic
    order of the token ids.
    """
    if int(k) < 1:
        raise ValueError(f"beam width must be >= 1, got {k}")
    k = int(k)
    enc, n = _encode_input(model, source, vocabulary)
    max_len = default_max_len(n) if max_len is None else max_len
    beam = [Hypothesis((), 0.0, model.init_state(enc), False)]
    for _ in range(max_len):
        live = [h for h in beam if not h.complete]
        if not live:
            break
        state = _stack([h.state for h in live])
        prev = np.array([h.tokens[-1] if h.tokens else SOS for h in live])
        logp, new_state, _ = model.step_log_probs(state, prev, enc.repeat(len(live)))
        logp = _masked(logp).astype(np.float64)
        totals = np.array([h.log_prob for h in live])[:, None] + logp
        pool = [h for h in beam if h.complete]
        flat = totals.ravel()
        if flat.size > k:
            # only expansions scoring at least the k-th best expansion can survive
            cutoff = np.partition(flat, flat.size - k)[flat.size - k]
            picks = np.nonzero(flat >= cutoff)[0]
        else:
            picks = np.arange(flat.size)
        V = totals.shape[1]
        for idx in picks:
            i, tok = divmod(int(idx), V)
            if not np.isfinite(flat[idx]):
                continue
            h = live[i]
            pool.append(Hypothesis(
                h.tokens if tok == EOS else h.tokens + (tok,),
                h.log_prob + float(logp[i, tok]),
                (i, new_state),
                tok == EOS))
        pool.sort(key=Hypothesis.key)
        beam = pool[:k]
        for h in beam:
            if isinstance(h.state, tuple):
                i, st = h.state
                h.state = _row(st, i)
    finals = sorted(beam, key=Hypothesis.key)
    if length_normalize:
        finals.sort(key=lambda h: (-h.log_prob / (len(h.tokens) + int(h.complete) or 1),
                                   h.key()[1]))
    seen, cands, scores, done = set(), [], [], []
    for h in finals:
        if h.tokens in seen:
            continue
        seen.add(h.tokens)
        cands.append(_output(h.tokens, vocabulary))
        scores.append(h.log_prob)
        done.append(h.complete)
    return PatchSet(cands, scores, done)


def score_sequence(model, source, target, complete=True, vocabulary=None):
    """Teacher-forced log-probability of ``target`` (plus EOS if complete)."""
    enc, _ = _encode_input(model, source, vocabulary)
    ids = vocabulary.encode(target) if vocabulary is not None else list(target)
    state = model.init_state(enc)
    prev = np.array([SOS])
    total = 0.0
    steps = list(ids) + ([EOS] if complete else [])
    for tok in steps:
        logp, state, _ = model.step_log_probs(state, prev, enc)
        total += float(_masked(logp).astype(np.float64)[0, tok])
        prev = np.array([tok])
    return total


def predict_patches(model, buggy_source, vocabulary, k=1, idioms=(), max_len=None, concretize_output=True):
    """Abstract ``buggy_source``, beam-decode it and concretize every candidate.

    Returns a list of (rank, score, AbstractedMethod, text or UnmappableId).
    Candidates using an ID missing from the input's mapping are reported
    as the UnmappableId instance instead of being dropped.
    """
    abstracted, mapping = abstract_method(tokenize(buggy_source), idioms)
    missing = [t for t in abstracted.tokens if t not in vocabulary]
    if missing:
        raise ValueError(f"input contains tokens outside the model vocabulary: {sorted(set(missing))}")
    patches = beam_decode(model, abstracted.tokens, k, max_len=max_len, vocabulary=vocabulary)
    out = []
    for rank, (cand, score) in enumerate(patches, start=1):
        if not concretize_output:
            out.append((rank, score, cand, None))
            continue
        try:
            text = concretize(cand, mapping)
        except UnmappableId as exc:
            text = exc
        out.append((rank, score, cand, text))
    return out
