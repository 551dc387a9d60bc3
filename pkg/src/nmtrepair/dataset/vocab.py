from __future__ import annotations

from pathlib import Path

SPECIALS = ("<pad>", "<s>", "</s>")


class OutOfVocabulary(KeyError):
    def __init__(self, token):
        super().__init__(token)
        self.token = token


class Vocabulary:
    """Closed token vocabulary; indices 0..2 are PAD, SOS and EOS."""

    def __init__(self, tokens):
        tokens = list(tokens)
        if tuple(tokens[:3]) != SPECIALS:
            raise ValueError(f"vocabulary must start with {SPECIALS}")
        if len(set(tokens)) != len(tokens):
            raise ValueError("vocabulary tokens must be distinct")
        self.tokens = tokens
        self._index = {t: i for i, t in enumerate(tokens)}

    @classmethod
    def from_sequences(cls, sequences):
        """Specials followed by every distinct token, sorted."""
        seen = set()
        for seq in sequences:
            seen.update(seq)
        seen -= set(SPECIALS)
        return cls(list(SPECIALS) + sorted(seen))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def index(self, token):
        try:
            return self._index[token]
        except KeyError:
            raise OutOfVocabulary(token) from None

    def encode(self, tokens):
        return [self.index(t) for t in tokens]

    def decode(self, ids):
        return [self.tokens[int(i)] for i in ids]

    def write(self, path):
        Path(path).write_text("".join(t + "\n" for t in self.tokens), encoding="utf-8")

    @classmethod
    def read(cls, path):
        return cls(Path(path).read_text(encoding="utf-8").splitlines())
