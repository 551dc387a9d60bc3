"""Idiom sets: frequent identifiers/literals kept verbatim by the abstraction."""
from __future__ import annotations

import math
from collections import Counter
from pathlib import Path

from .abstraction import is_id_token

# Loop counters, common literals and names, wrapper types and exceptions.
BASE_IDIOMS = frozenset("""
i j k index idx size add get set put remove contains length min max equals
hashCode toString isEmpty clear close append valueOf parseInt getValue
keySet values next hasNext iterator substring trim split
0 1 2 0L 1L 0.0 1.0 0.0f 1.0f "" '\\0'
String Integer Long Short Byte Character Boolean Double Float Number Object Math
System out println print List ArrayList Map HashMap Set HashSet Collection Collections
Arrays Iterator StringBuilder
Exception RuntimeException IllegalArgumentException IllegalStateException
NullPointerException IndexOutOfBoundsException ArrayIndexOutOfBoundsException
UnsupportedOperationException IOException ClassCastException NumberFormatException
InterruptedException Throwable Error
""".split())


def check_idioms(idioms):
    idioms = frozenset(idioms)
    bad = sorted(t for t in idioms if is_id_token(t))
    if bad:
        raise ValueError(f"idioms collide with the ID namespace: {bad}")
    return idioms


def _abstractable(tok):
    return tok.category == "identifier" or tok.category in (
        "string_literal", "char_literal", "int_literal", "float_literal")


def count_lexemes(corpus):
    counts = Counter()
    for method in corpus:
        counts.update(t.lexeme for t in method if _abstractable(t))
    return counts


def mine_idioms(corpus, top_fraction=0.00005, base_idioms=BASE_IDIOMS):
    """Union ``base_idioms`` with the most frequent identifier/literal lexemes.

    ``corpus`` is an iterable of token lists.  Keywords and separators are
    never counted.  The number of mined lexemes is
    ``floor(top_fraction * distinct_lexemes)``; frequency ties are broken
    lexicographically.  Returns a sorted list.
    """
    if not 0 < top_fraction < 1:
        raise ValueError(f"top_fraction must be in (0, 1), got {top_fraction}")
    counts = count_lexemes(corpus)
    if not counts:
        raise ValueError("empty corpus: no identifiers or literals to count")
    n_top = math.floor(top_fraction * len(counts))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    mined = {lex for lex, _ in ranked[:n_top]}
    return sorted(check_idioms(set(base_idioms) | mined))


def write_idioms(idioms, path):
    Path(path).write_text("".join(f"{t}\n" for t in sorted(idioms)), encoding="utf-8")


def read_idioms(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return check_idioms(line for line in lines if line.strip())
