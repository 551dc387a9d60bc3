"""Input validation helpers shared by the estimators."""
from __future__ import annotations

from sklearn.exceptions import NotFittedError


def check_is_fitted(estimator, attributes):
    if isinstance(attributes, str):
        attributes = [attributes]
    missing = [a for a in attributes if getattr(estimator, a, None) is None]
    if missing:
        raise NotFittedError(
            f"This {type(estimator).__name__} instance is not fitted yet; call 'fit' first "
            f"(missing {', '.join(missing)})."
        )


def check_token_sequences(X, name="X", allow_empty_sequence=False):
    """Coerce ``X`` into a list of tuples of strings.

    Each element may be a whitespace separated string, a sequence of strings
    or anything with a ``tokens`` attribute (AbstractedMethod).
    """
    if isinstance(X, str):
        raise TypeError(f"{name} must be a sequence of token sequences, got a single string")
    out = []
    for i, seq in enumerate(X):
        if hasattr(seq, "tokens"):
            seq = seq.tokens
        if isinstance(seq, str):
            seq = seq.split()
        seq = tuple(seq)
        if not all(isinstance(t, str) and t for t in seq):
            raise TypeError(f"{name}[{i}] must contain non-empty strings")
        if not seq and not allow_empty_sequence:
            raise ValueError(f"{name}[{i}] is empty")
        out.append(seq)
    if not out:
        raise ValueError(f"{name} is empty")
    return out


def check_consistent_length(*arrays):
    lengths = {len(a) for a in arrays if a is not None}
    if len(lengths) > 1:
        raise ValueError(f"inconsistent numbers of samples: {sorted(lengths)}")


def check_positive_int(value, name, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"{name} must be an int, got {type(value).__name__}")
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else ">= 1"
        raise ValueError(f"{name} must be {bound}, got {value}")
    return value
