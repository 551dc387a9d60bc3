"""Bug-fix pairs: construction from method sources, filtering and bucketing."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from ..lexabs import AbstractedMethod, IdMapping, LexError, abstract_pair, split_id, tokenize
from ..treediff import ParseError, diff, parse_method

MAX_ACTIONS = 100
SMALL_MAX = 50
MEDIUM_MAX = 100
DEFAULT_CAP = 10

REJECT_REASONS = (
    "lex_parse_error",
    "identical_after_abstraction",
    "too_many_actions",
    "no_actions",
    "id_over_cap",
)


@dataclass
class BugFixPair:
    """Abstracted buggy/fixed methods with their edit actions and mapping."""

    buggy: AbstractedMethod
    fixed: AbstractedMethod
    actions: list
    mapping: IdMapping
    provenance: tuple = ()
    buggy_source: str | None = field(default=None, repr=False)
    fixed_source: str | None = field(default=None, repr=False)

    def __post_init__(self):
        if tuple(self.buggy) == tuple(self.fixed):
            raise ValueError("buggy and fixed methods are identical")
        if not 1 <= len(self.actions) <= MAX_ACTIONS:
            raise ValueError(f"a pair needs 1..{MAX_ACTIONS} actions, got {len(self.actions)}")

    @property
    def key(self):
        return (tuple(self.buggy), tuple(self.fixed))

    def operations(self):
        return {a.operation for a in self.actions}


@dataclass
class Candidate:
    """A raw buggy/fixed method pair before filtering.

    ``error`` holds the lex/parse failure message when either side could
    not be processed; the other fields are then None.
    """

    buggy: AbstractedMethod | None
    fixed: AbstractedMethod | None
    actions: list | None
    mapping: IdMapping | None
    provenance: tuple = ()
    error: str | None = None
    buggy_source: str | None = None
    fixed_source: str | None = None


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None

    def __bool__(self):
        return self.accepted


ACCEPT = Verdict(True)


def make_candidate(buggy_source, fixed_source, idioms=frozenset(), provenance=()):
    """Lex, parse, abstract and diff one pair of method sources."""
    try:
        tb, tf = tokenize(buggy_source), tokenize(fixed_source)
        ast_b, ast_f = parse_method(tb), parse_method(tf)
    except (LexError, ParseError, RecursionError) as exc:
        return Candidate(None, None, None, None, tuple(provenance), error=str(exc) or type(exc).__name__,
                         buggy_source=buggy_source, fixed_source=fixed_source)
    abs_b, abs_f, mapping = abstract_pair(tb, tf, idioms)
    actions = diff(ast_b, ast_f)
    return Candidate(abs_b, abs_f, actions, mapping, tuple(provenance),
                     buggy_source=buggy_source, fixed_source=fixed_source)


def _max_index(method):
    return max((split_id(t)[1] for t in method.ids()), default=0)


def filter_pair(candidate, cap=DEFAULT_CAP, max_actions=MAX_ACTIONS):
    """Accept or reject a candidate; rejection carries the first failing rule."""
    if candidate.error is not None or candidate.buggy is None or candidate.fixed is None:
        return Verdict(False, "lex_parse_error")
    if tuple(candidate.buggy) == tuple(candidate.fixed):
        return Verdict(False, "identical_after_abstraction")
    n = len(candidate.actions or ())
    if n > max_actions:
        return Verdict(False, "too_many_actions")
    if n == 0:
        return Verdict(False, "no_actions")
    if cap is not None and max(_max_index(candidate.buggy), _max_index(candidate.fixed)) > cap:
        return Verdict(False, "id_over_cap")
    return ACCEPT


def to_pair(candidate):
    return BugFixPair(candidate.buggy, candidate.fixed, list(candidate.actions), candidate.mapping,
                      candidate.provenance, candidate.buggy_source, candidate.fixed_source)


def build_pairs(candidates, cap=DEFAULT_CAP):
    """Filter candidates; return (accepted pairs, Counter of outcomes)."""
    stats = Counter()
    out = []
    for cand in candidates:
        verdict = filter_pair(cand, cap)
        stats["accepted" if verdict else verdict.reason] += 1
        if verdict:
            out.append(to_pair(cand))
    return out, stats


def bucket(pair):
    """``"small"`` (<= 50 tokens), ``"medium"`` (<= 100) or ``"oversize"``."""
    n = max(len(pair.buggy), len(pair.fixed))
    if n <= SMALL_MAX:
        return "small"
    if n <= MEDIUM_MAX:
        return "medium"
    return "oversize"
