"""Two-phase node matcher between a buggy and a fixed method tree.

Phase one pairs identical subtrees top-down (tallest first).  Phase two
walks the buggy tree bottom-up and pairs still unmatched inner nodes with
the same-typed fixed node sharing the most matched descendants, then a
recovery pass aligns the children of every matched pair by (type, label)
and by type alone.  The result is not minimal; diff soundness does not
depend on it.
"""
from __future__ import annotations

from collections import defaultdict

MIN_HEIGHT = 2
MIN_DICE = 0.5


class Mapping:
    def __init__(self):
        self.src_to_dst = {}
        self.dst_to_src = {}

    def add(self, s, d):
        self.src_to_dst[id(s)] = d
        self.dst_to_src[id(d)] = s

    def dst(self, s):
        return self.src_to_dst.get(id(s))

    def src(self, d):
        return self.dst_to_src.get(id(d))

    def has_src(self, s):
        return id(s) in self.src_to_dst

    def has_dst(self, d):
        return id(d) in self.dst_to_src


def _hashes(root):
    out = {}
    for node in root.postorder():
        out[id(node)] = hash((node.node_type, node.label, tuple(out[id(c)] for c in node.children)))
    return out


def _heights(root):
    out = {}
    for node in root.postorder():
        out[id(node)] = 1 + max((out[id(c)] for c in node.children), default=0)
    return out


def _add_subtree(mapping, s, d):
    for a, b in zip(s.preorder(), d.preorder()):
        mapping.add(a, b)


def _lcs(xs, ys, eq):
    n, m = len(xs), len(ys)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        for j in range(m - 1, -1, -1):
            if eq(xs[i], ys[j]):
                table[i][j] = table[i + 1][j + 1] + 1
            else:
                table[i][j] = max(table[i + 1][j], table[i][j + 1])
    out = []
    i = j = 0
    while i < n and j < m:
        if eq(xs[i], ys[j]):
            out.append((xs[i], ys[j]))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return out


def _top_down(src, dst, mapping):
    hs, hd = _hashes(src), _hashes(dst)
    ht_s, ht_d = _heights(src), _heights(dst)
    by_height_s = defaultdict(list)
    by_height_d = defaultdict(list)
    for n in src.preorder():
        by_height_s[ht_s[id(n)]].append(n)
    for n in dst.preorder():
        by_height_d[ht_d[id(n)]].append(n)
    for h in sorted(set(by_height_s) | set(by_height_d), reverse=True):
        if h < MIN_HEIGHT:
            break
        cand_s = defaultdict(list)
        cand_d = defaultdict(list)
        for n in by_height_s.get(h, ()):
            if not mapping.has_src(n):
                cand_s[hs[id(n)]].append(n)
        for n in by_height_d.get(h, ()):
            if not mapping.has_dst(n):
                cand_d[hd[id(n)]].append(n)
        for key, ss in cand_s.items():
            ds = cand_d.get(key)
            if not ds:
                continue
            for s, d in zip(ss, ds):
                if s.signature() == d.signature():
                    _add_subtree(mapping, s, d)


def _descendants(node):
    it = node.preorder()
    next(it)
    return list(it)


def _dice(s, d, mapping):
    ds = _descendants(s)
    dd = _descendants(d)
    if not ds and not dd:
        return 0.0
    dd_ids = {id(x) for x in dd}
    common = sum(1 for x in ds if mapping.has_src(x) and id(mapping.dst(x)) in dd_ids)
    return 2.0 * common / (len(ds) + len(dd))


def _bottom_up(src, dst, mapping):
    dst_by_type = defaultdict(list)
    for n in dst.preorder():
        dst_by_type[n.node_type].append(n)
    for s in src.postorder():
        if mapping.has_src(s) or not s.children:
            continue
        best, best_score = None, MIN_DICE
        for d in dst_by_type.get(s.node_type, ()):
            if mapping.has_dst(d):
                continue
            score = _dice(s, d, mapping)
            if score > best_score:
                best, best_score = d, score
        if best is not None:
            mapping.add(s, best)


def _recover(src, dst, mapping):
    queue = [(src, dst)]
    while queue:
        s, d = queue.pop(0)
        free_s = [c for c in s.children if not mapping.has_src(c)]
        free_d = [c for c in d.children if not mapping.has_dst(c)]
        if free_s and free_d:
            for a, b in _lcs(free_s, free_d, lambda x, y: (x.node_type, x.label) == (y.node_type, y.label)):
                mapping.add(a, b)
            free_s = [c for c in free_s if not mapping.has_src(c)]
            free_d = [c for c in free_d if not mapping.has_dst(c)]
            for a, b in _lcs(free_s, free_d, lambda x, y: x.node_type == y.node_type):
                mapping.add(a, b)
        for c in s.children:
            partner = mapping.dst(c)
            if partner is not None:
                queue.append((c, partner))


def match(src, dst):
    """Compute a one-to-one, type-preserving node mapping; roots are paired."""
    mapping = Mapping()
    if src.node_type != dst.node_type:
        raise ValueError("root node types differ")
    mapping.add(src, dst)
    _top_down(src, dst, mapping)
    _bottom_up(src, dst, mapping)
    _recover(src, dst, mapping)
    return mapping
