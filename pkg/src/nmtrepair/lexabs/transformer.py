from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin

from .._validation import check_consistent_length, check_is_fitted
from .abstraction import abstract_method, abstract_pair
from .concretize import concretize
from .idioms import BASE_IDIOMS, check_idioms, mine_idioms
from .lexer import tokenize


def _as_token_list(method):
    return tokenize(method) if isinstance(method, str) else list(method)


class MethodAbstractor(TransformerMixin, BaseEstimator):
    """Abstract Java methods into the closed ID/idiom vocabulary.

    Parameters
    ----------
    idioms : iterable of str, default=None
        Base idiom set. ``None`` uses the shipped list.
    top_fraction : float or None, default=None
        When set, ``fit`` mines the most frequent identifier/literal lexemes
        of the training methods (this fraction of distinct lexemes) and adds
        them to the base idioms.
    """

    def __init__(self, idioms=None, top_fraction=None):
        self.idioms = idioms
        self.top_fraction = top_fraction

    def fit(self, X, y=None):
        base = BASE_IDIOMS if self.idioms is None else check_idioms(self.idioms)
        if self.top_fraction is None:
            self.idioms_ = frozenset(base)
        else:
            corpus = [_as_token_list(m) for m in X]
            if y is not None:
                corpus += [_as_token_list(m) for m in y]
            self.idioms_ = frozenset(mine_idioms(corpus, self.top_fraction, base))
        return self

    def transform(self, X):
        """Abstract each method on its own; returns (AbstractedMethod, IdMapping) pairs."""
        check_is_fitted(self, "idioms_")
        return [abstract_method(_as_token_list(m), self.idioms_) for m in X]

    def transform_pairs(self, buggy, fixed):
        """Abstract aligned buggy/fixed methods with one mapping per pair."""
        check_is_fitted(self, "idioms_")
        check_consistent_length(buggy, fixed)
        return [
            abstract_pair(_as_token_list(b), _as_token_list(f), self.idioms_)
            for b, f in zip(buggy, fixed)
        ]

    def inverse_transform(self, X, mappings):
        check_consistent_length(X, mappings)
        return [concretize(a, m) for a, m in zip(X, mappings)]
