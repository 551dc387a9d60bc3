"""Synthetic bug-fix corpus built from method templates and known mutations.

Each sample starts from a correct ("fixed") method assembled from a few
filler statements and one fix site.  The buggy version is obtained by
undoing the fix at that site, so the edit between the two is known by
construction.  Identifier names are drawn from one of two disjoint pools,
which lets a held-out set use names never seen in training.
"""
from __future__ import annotations

import numpy as np

from ..lexabs import BASE_IDIOMS
from .pairs import DEFAULT_CAP, bucket, filter_pair, make_candidate, to_pair

MUTATIONS = (
    "operator-flip",
    "literal-swap",
    "guard-insertion",
    "statement-deletion",
    "method-call-rename-to-idiom",
)

_NOUNS = """
user order item account record node entry task event message buffer payload
session client request response token widget ledger cache queue packet sensor
report invoice ticket vertex edge cell row column frame shard batch chunk
segment slot track layer block peer route job lease quota rule patch bundle
asset label topic field group member owner policy schema metric sample probe
""".split()
_VERBS = """
load save process handle compute update render parse emit flush register
resolve check build merge scan send fetch store notify publish validate
encode decode attach detach refresh reset sync lock
""".split()
_TYPE_SUFFIX = ["Manager", "Service", "Helper", "Store", "Handler", "Context", "Builder", "Model"]
_VAR_SUFFIX = ["", "s", "List", "Count", "Map", "Id", "Ref", "Info"]
_STRINGS = ['"ok"', '"none"', '"retry"', '"done"', '"fail"', '"skip"', '"wait"', '"next"']


def _camel(a, b):
    return a + b[:1].upper() + b[1:]


class _Names:
    """Fresh identifiers for one method, drawn without repetition."""

    def __init__(self, rng, pool):
        self.rng = rng
        half = len(_NOUNS) // 2
        if pool == "train":
            self.nouns = _NOUNS[:half]
            self.verbs = _VERBS[: len(_VERBS) // 2]
        elif pool == "heldout":
            self.nouns = _NOUNS[half:]
            self.verbs = _VERBS[len(_VERBS) // 2:]
        else:
            raise ValueError(f"unknown identifier pool {pool!r}")
        self.used = set(BASE_IDIOMS)

    def _fresh(self, make):
        for _ in range(1000):
            name = make()
            if name not in self.used:
                self.used.add(name)
                return name
        raise RuntimeError("identifier pool exhausted")

    def var(self):
        rng = self.rng
        return self._fresh(lambda: self.nouns[rng.integers(len(self.nouns))]
                           + _VAR_SUFFIX[rng.integers(len(_VAR_SUFFIX))])

    def method(self):
        rng = self.rng
        return self._fresh(lambda: _camel(self.verbs[rng.integers(len(self.verbs))],
                                          self.nouns[rng.integers(len(self.nouns))]))

    def type(self):
        rng = self.rng
        return self._fresh(lambda: self.nouns[rng.integers(len(self.nouns))].capitalize()
                           + _TYPE_SUFFIX[rng.integers(len(_TYPE_SUFFIX))])

    def string(self):
        return _STRINGS[self.rng.integers(len(_STRINGS))]


def _pick(rng, options):
    return options[rng.integers(len(options))]


# -- fix sites: each returns (fixed statements, buggy statements) ------------

def _site_operator_flip(rng, nm):
    variant = rng.integers(3)
    if variant == 0:
        coll, obj, m = nm.var(), nm.var(), nm.method()
        body = f"{{ {obj}.{m}({coll}.get(i)); }}"
        return ([f"for (int i = 0; i < {coll}.size(); i++) {body}"],
                [f"for (int i = 0; i <= {coll}.size(); i++) {body}"])
    if variant == 1:
        a, b, obj, m = nm.var(), nm.var(), nm.var(), nm.method()
        body = f"{{ {obj}.{m}({a}, {b}); }}"
        return ([f"if ({a} > 0 && {b} > 0) {body}"], [f"if ({a} > 0 || {b} > 0) {body}"])
    obj, m = nm.var(), nm.method()
    body = f"{{ {obj}.{m}(); }}"
    return ([f"if ({obj} != null) {body}"], [f"if ({obj} == null) {body}"])


def _site_literal_swap(rng, nm):
    variant = rng.integers(3)
    if variant == 0:
        x, coll = nm.var(), nm.var()
        return [f"{x} = {coll}.get(0);"], [f"{x} = {coll}.get(1);"]
    if variant == 1:
        coll, obj, m = nm.var(), nm.var(), nm.method()
        body = f"{{ {obj}.{m}({coll}.get(i)); }}"
        return ([f"for (int i = 0; i < {coll}.size(); i++) {body}"],
                [f"for (int i = 1; i < {coll}.size(); i++) {body}"])
    coll, obj, m = nm.var(), nm.var(), nm.method()
    body = f"{{ {obj}.{m}({coll}); }}"
    return ([f"if ({coll}.size() > 0) {body}"], [f"if ({coll}.size() > 1) {body}"])


def _site_guard_insertion(rng, nm):
    obj, m = nm.var(), nm.method()
    args = ", ".join(nm.var() for _ in range(rng.integers(1, 3)))
    call = f"{obj}.{m}({args});"
    return [f"if ({obj} != null) {{ {call} }}"], [call]


def _site_statement_deletion(rng, nm):
    variant = rng.integers(2)
    if variant == 0:
        obj, m = nm.var(), nm.method()
        use = f"{obj}.{m}();"
        return [use], [f"{obj} = null;", use]
    coll, x = nm.var(), nm.var()
    use = f"{coll}.add({x});"
    return [use], [f"{coll}.clear();", use]


def _site_call_rename(rng, nm):
    variant = rng.integers(3)
    coll, bad = nm.var(), nm.method()
    if variant == 0:
        x = nm.var()
        return [f"{x} = {coll}.get(i);"], [f"{x} = {coll}.{bad}(i);"]
    if variant == 1:
        n = nm.var()
        return [f"int {n} = {coll}.size();"], [f"int {n} = {coll}.{bad}();"]
    x = nm.var()
    return [f"{coll}.add({x});"], [f"{coll}.{bad}({x});"]


_SITES = {
    "operator-flip": _site_operator_flip,
    "literal-swap": _site_literal_swap,
    "guard-insertion": _site_guard_insertion,
    "statement-deletion": _site_statement_deletion,
    "method-call-rename-to-idiom": _site_call_rename,
}


def _filler(rng, nm):
    kind = rng.integers(5)
    if kind == 0:
        return f"int {nm.var()} = {nm.var()} + 1;"
    if kind == 1:
        return f"{nm.var()} = {nm.var()}.size();"
    if kind == 2:
        t = nm.type()
        return f"{t} {nm.var()} = new {t}();"
    if kind == 3:
        return f"String {nm.var()} = {nm.string()};"
    return f"{nm.var()} = {nm.var()};"


def _method(rng, nm, site_stmts, prefix, suffix, ret, params, name):
    body = prefix + site_stmts + suffix
    if ret != "void":
        body = body + [ret[1]]
    return f"public {ret if ret == 'void' else ret[0]} {name}({params}) {{ " + " ".join(body) + " }"


def synthesize_method_pair(rng, kind, pool="train"):
    """One (fixed source, buggy source, method name) sample of a mutation kind."""
    nm = _Names(rng, pool)
    name = nm.method()
    fixed_site, buggy_site = _SITES[kind](rng, nm)
    prefix = [_filler(rng, nm) for _ in range(rng.integers(0, 3))]
    suffix = [_filler(rng, nm) for _ in range(rng.integers(0, 2))]
    ret_kind = rng.integers(3)
    if ret_kind == 0:
        ret = "void"
    elif ret_kind == 1:
        ret = ("int", f"return {nm.var()};")
    else:
        ret = ("boolean", f"return {nm.var()}.isEmpty();")
    n_params = rng.integers(0, 3)
    params = ", ".join(_pick(rng, [f"{nm.type()} {nm.var()}", f"int {nm.var()}",
                                   f"List<{nm.type()}> {nm.var()}"]) for _ in range(n_params))
    fixed = _method(rng, nm, fixed_site, prefix, suffix, ret, params, name)
    buggy = _method(rng, nm, buggy_site, prefix, suffix, ret, params, name)
    return fixed, buggy, name


def generate_synthetic_corpus(templates, mutations=MUTATIONS, seed=0, pool="train", idioms=None,
                              cap=DEFAULT_CAP, max_bucket="small", exclude=(), unique=True,
                              max_attempts=None):
    """Generate ``templates`` accepted bug-fix pairs.

    Mutation kinds are sampled uniformly from ``mutations``.  Samples that
    fail the dataset filters, fall outside ``max_bucket``, repeat an earlier
    (buggy, fixed) pair (when ``unique``) or whose key is in ``exclude`` are
    redrawn.  The output depends only on the arguments.
    """
    kinds = sorted(set(mutations))
    if not kinds:
        raise ValueError("at least one mutation kind is required")
    unknown = [k for k in kinds if k not in _SITES]
    if unknown:
        raise ValueError(f"unknown mutation kinds {unknown}; expected a subset of {list(MUTATIONS)}")
    if templates < 0:
        raise ValueError("templates must be non-negative")
    idioms = BASE_IDIOMS if idioms is None else frozenset(idioms)
    allowed = {"small"} if max_bucket == "small" else {"small", "medium"}
    rng = np.random.default_rng(seed)
    seen = set(exclude)
    out = []
    attempts = 0
    limit = max_attempts if max_attempts is not None else 50 * templates + 100
    while len(out) < templates:
        attempts += 1
        if attempts > limit:
            raise RuntimeError(f"could only generate {len(out)} of {templates} pairs")
        kind = kinds[rng.integers(len(kinds))]
        fixed, buggy, name = synthesize_method_pair(rng, kind, pool)
        cand = make_candidate(buggy, fixed, idioms, ("synthetic", f"{pool}-{seed}", kind, name))
        if not filter_pair(cand, cap):
            continue
        pair = to_pair(cand)
        if bucket(pair) not in allowed:
            continue
        if pair.key in seen:
            continue
        if unique:
            seen.add(pair.key)
        out.append(pair)
    return out
