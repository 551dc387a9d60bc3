"""From mined file pairs to changed method pairs (JSON lines)."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

from ..lexabs import format_tokens
from ..treediff import ParseError, map_method_pairs


@dataclass(frozen=True)
class MethodPair:
    repo_id: str
    commit_id: str
    path: str
    method: str
    buggy: str
    fixed: str

    @property
    def provenance(self):
        return (self.repo_id, self.commit_id, self.path, self.method)


def _method_text(node):
    return format_tokens(t.lexeme for t in node.tokens)


def extract_method_pairs(file_pairs, stats=None):
    """Yield a MethodPair for every mapped method whose tokens changed.

    File pairs that fail to lex or parse are skipped and counted in
    ``stats["file_parse_error"]``.
    """
    stats = stats if stats is not None else Counter()
    for fp in file_pairs:
        try:
            mapped = map_method_pairs(fp.buggy_source, fp.fixed_source)
        except (ParseError, RecursionError):
            stats["file_parse_error"] += 1
            continue
        stats["files"] += 1
        for mb, mf in mapped:
            lb = [t.lexeme for t in mb.tokens]
            lf = [t.lexeme for t in mf.tokens]
            if lb == lf:
                continue
            stats["changed_methods"] += 1
            yield MethodPair(fp.repo_id, fp.commit_id, fp.path, mb.label, _method_text(mb), _method_text(mf))


def write_method_pairs(pairs, path):
    lines = [json.dumps(asdict(p), sort_keys=True) for p in pairs]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)


def read_method_pairs(path):
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(MethodPair(**json.loads(line)))
    return out
