"""scikit-learn style wrapper around model construction, training and decoding."""
from __future__ import annotations

from types import SimpleNamespace

from sklearn.base import BaseEstimator

from .._validation import check_consistent_length, check_is_fitted, check_positive_int, check_token_sequences
from ..dataset.vocab import Vocabulary
from .model import SMALL_BUCKETS, ModelConfig, Seq2SeqModel
from .training import select_best, train


class Seq2SeqRepairer(BaseEstimator):
    """Learn to translate abstracted buggy methods into fixed ones.

    ``X`` and ``y`` are sequences of token sequences (lists of strings,
    space separated strings or AbstractedMethod objects).

    Examples
    --------
    >>> est = Seq2SeqRepairer(hidden_units=16, embedding_dim=16, max_epochs=2)
    >>> est.fit(["a b c", "b c"], ["a c", "c"])  # doctest: +SKIP
    """

    def __init__(self, cell_kind="lstm", encoder_layers=1, decoder_layers=2, hidden_units=256,
                 embedding_dim=512, attention="additive", max_epochs=30, learning_rate=1.0,
                 lr_decay=0.5, batch_size=32, clip_norm=5.0, max_steps=None, optimizer="sgd",
                 bucket_spec=SMALL_BUCKETS, beam_width=1, dtype="float32", random_state=0):
        self.cell_kind = cell_kind
        self.encoder_layers = encoder_layers
        self.decoder_layers = decoder_layers
        self.hidden_units = hidden_units
        self.embedding_dim = embedding_dim
        self.attention = attention
        self.max_epochs = max_epochs
        self.learning_rate = learning_rate
        self.lr_decay = lr_decay
        self.batch_size = batch_size
        self.clip_norm = clip_norm
        self.max_steps = max_steps
        self.optimizer = optimizer
        self.bucket_spec = bucket_spec
        self.beam_width = beam_width
        self.dtype = dtype
        self.random_state = random_state

    def _config(self, vocabulary_size):
        return ModelConfig(
            cell_kind=self.cell_kind, encoder_layers=self.encoder_layers,
            decoder_layers=self.decoder_layers, hidden_units=self.hidden_units,
            embedding_dim=self.embedding_dim, vocabulary_size=vocabulary_size,
            max_epochs=self.max_epochs, bucket_spec=tuple(self.bucket_spec), attention=self.attention,
            learning_rate=self.learning_rate, lr_decay=self.lr_decay, batch_size=self.batch_size,
            clip_norm=self.clip_norm, max_steps=self.max_steps, optimizer=self.optimizer,
            dtype=self.dtype)

    def fit(self, X, y, X_val=None, y_val=None):
        X = check_token_sequences(X, "X")
        y = check_token_sequences(y, "y")
        check_consistent_length(X, y)
        val = []
        if X_val is not None:
            X_val = check_token_sequences(X_val, "X_val")
            y_val = check_token_sequences(y_val, "y_val")
            check_consistent_length(X_val, y_val)
            val = list(zip(X_val, y_val))
        self.vocabulary_ = Vocabulary.from_sequences(X + y + [s for pair in val for s in pair])
        config = self._config(len(self.vocabulary_))
        model = Seq2SeqModel(config, seed=self.random_state)
        data = SimpleNamespace(train=list(zip(X, y)), validation=val, vocabulary=self.vocabulary_)
        self.checkpoints_ = train(model, data, config, seed=self.random_state)
        best = select_best(self.checkpoints_)
        model.params = {k: v.copy() for k, v in best.params.items()}
        self.model_ = model
        self.best_epoch_ = best.epoch
        return self

    def _inputs(self, X):
        check_is_fitted(self, ["model_", "vocabulary_"])
        return check_token_sequences(X, "X")

    def predict(self, X, max_len=None):
        """Greedy translation of every input."""
        from ..decode import greedy_decode

        return [greedy_decode(self.model_, x, max_len, self.vocabulary_) for x in self._inputs(X)]

    def predict_patches(self, X, k=None, max_len=None):
        """Beam search with width ``k`` (default ``beam_width``); one PatchSet per input."""
        from ..decode import beam_decode

        k = check_positive_int(self.beam_width if k is None else k, "k")
        return [beam_decode(self.model_, x, k, max_len, self.vocabulary_) for x in self._inputs(X)]

    def score(self, X, y):
        """Perfect-prediction rate at ``beam_width``."""
        y = check_token_sequences(y, "y")
        patches = self.predict_patches(X)
        check_consistent_length(patches, y)
        hits = sum(any(tuple(c) == t for c in p.candidates) for p, t in zip(patches, y))
        return hits / len(y)

