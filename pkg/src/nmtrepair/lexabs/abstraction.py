from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lexer import Token
from .roles import ID_CATEGORIES, classify_roles

ID_PATTERN = re.compile(r"^(METHOD|VAR|TYPE|STRING|CHAR|INT|FLOAT)_([1-9][0-9]*)$")


def is_id_token(token):
    return ID_PATTERN.match(token) is not None


def split_id(token):
    m = ID_PATTERN.match(token)
    if m is None:
        raise ValueError(f"{token!r} is not an ID token")
    return m.group(1), int(m.group(2))


@dataclass(frozen=True)
class AbstractedMethod:
    """Abstract token sequence (keywords, separators, idioms and IDs)."""

    tokens: tuple

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __str__(self):
        return " ".join(self.tokens)

    @classmethod
    def from_string(cls, line):
        return cls(tuple(line.split()))

    def ids(self):
        return [t for t in self.tokens if is_id_token(t)]

    def max_id_index(self):
        return max((split_id(t)[1] for t in self.ids()), default=0)


@dataclass
class IdMapping:
    """Per-pair map from ID to the original lexeme.

    The map is a bijection between IDs and (category, lexeme) keys: the same
    lexeme can show up under two categories (``foo(foo)`` gives METHOD_1 and
    VAR_1), never twice under one category.
    """

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        self._reverse = {}
        self._counters = dict.fromkeys(ID_CATEGORIES, 0)
        for ident, lexeme in self.entries.items():
            cat, idx = split_id(ident)
            if (cat, lexeme) in self._reverse:
                raise ValueError(f"{lexeme!r} mapped twice under {cat}")
            self._reverse[(cat, lexeme)] = ident
            self._counters[cat] = max(self._counters[cat], idx)

    def id_for(self, category, lexeme):
        """Return the ID for ``lexeme``, allocating the next index if new."""
        key = (category, lexeme)
        ident = self._reverse.get(key)
        if ident is None:
            self._counters[category] += 1
            ident = f"{category}_{self._counters[category]}"
            self.entries[ident] = lexeme
            self._reverse[key] = ident
        return ident

    def __getitem__(self, ident):
        return self.entries[ident]

    def __contains__(self, ident):
        return ident in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, IdMapping) and self.entries == other.entries

    def items(self):
        return self.entries.items()

    def copy(self):
        return IdMapping(dict(self.entries))


def _abstract_stream(tokens, idioms, mapping):
    out = []
    for tok, role in classify_roles(tokens):
        if role is None or tok.lexeme in idioms:
            out.append(tok.lexeme)
        else:
            out.append(mapping.id_for(role, tok.lexeme))
    return AbstractedMethod(tuple(out))


def abstract_method(tokens, idioms=frozenset(), mapping=None):
    """Abstract one token stream, extending ``mapping`` (a fresh one if None)."""
    if mapping is None:
        mapping = IdMapping()
    return _abstract_stream(tokens, idioms, mapping), mapping


def abstract_pair(buggy, fixed, idioms=frozenset()):
    """Abstract a buggy/fixed pair with one shared mapping.

    The buggy stream is processed first; the fixed stream reuses its IDs and
    only allocates new ones for lexemes the buggy side never used.
    """
    mapping = IdMapping()
    abs_b = _abstract_stream(buggy, idioms, mapping)
    abs_f = _abstract_stream(fixed, idioms, mapping)
    return abs_b, abs_f, mapping


def as_tokens(tokens):
    """Accept either Token objects or (lexeme, category) tuples."""
    return [t if isinstance(t, Token) else Token(*t) for t in tokens]


def _escape(s):
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


def _unescape(s):
    out = []
    it = iter(s)
    for ch in it:
        if ch == "\\":
            nxt = next(it, "")
            out.append({"t": "\t", "n": "\n", "r": "\r", "\\": "\\"}.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def dump_mapping(mapping):
    """Serialize as ``ID<TAB>lexeme`` lines in allocation order."""
    return "".join(f"{ident}\t{_escape(lexeme)}\n" for ident, lexeme in mapping.items())


def load_mapping(text):
    entries = {}
    for line in text.splitlines():
        if not line:
            continue
        ident, sep, lexeme = line.partition("\t")
        if not sep:
            raise ValueError(f"malformed mapping line: {line!r}")
        entries[ident] = _unescape(lexeme)
    return IdMapping(entries)
