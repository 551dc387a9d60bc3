from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .parser import parse_methods

RENAME_THRESHOLD = 0.7


@dataclass
class MethodPairList:
    """Mapped (buggy, fixed) Method trees taken from one file pair."""

    pairs: list = field(default_factory=list)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def bigram_similarity(a, b):
    """Dice coefficient over the token-bigram multisets of two methods."""
    ba = Counter(zip(a, a[1:]))
    bb = Counter(zip(b, b[1:]))
    total = sum(ba.values()) + sum(bb.values())
    if total == 0:
        return 1.0 if list(a) == list(b) else 0.0
    return 2.0 * sum((ba & bb).values()) / total


def _lexemes(method):
    return [t.lexeme for t in method.tokens]


def _body_lexemes(method):
    # drop the header up to and including the first '{' so a rename does not count
    lex = _lexemes(method)
    try:
        return lex[lex.index("{"):]
    except ValueError:
        return lex


def map_method_pairs(buggy_file, fixed_file, threshold=RENAME_THRESHOLD):
    """Pair the methods of two versions of a file.

    Methods are paired by (name, parameter count) in declaration order; the
    leftovers are paired greedily by body bigram similarity when it exceeds
    ``threshold``.  Methods created or deleted by the change are dropped.
    """
    mb = parse_methods(buggy_file)
    mf = parse_methods(fixed_file)
    by_key = defaultdict(list)
    for m in mf:
        by_key[(m.label, m.param_count())].append(m)
    pairs = []
    left_b = []
    used = set()
    for m in mb:
        bucket = by_key.get((m.label, m.param_count()))
        if bucket:
            partner = bucket.pop(0)
            used.add(id(partner))
            pairs.append((m, partner))
        else:
            left_b.append(m)
    left_f = [m for m in mf if id(m) not in used]
    scored = []
    for i, a in enumerate(left_b):
        for j, b in enumerate(left_f):
            s = bigram_similarity(_body_lexemes(a), _body_lexemes(b))
            if s > threshold:
                scored.append((-s, i, j))
    taken_b, taken_f = set(), set()
    for _, i, j in sorted(scored):
        if i in taken_b or j in taken_f:
            continue
        taken_b.add(i)
        taken_f.add(j)
        pairs.append((left_b[i], left_f[j]))
    order = {id(m): k for k, m in enumerate(mb)}
    pairs.sort(key=lambda p: order[id(p[0])])
    return MethodPairList(pairs)
