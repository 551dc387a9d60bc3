"""Select bug-fixing commits and emit (buggy, fixed) file pairs.

Two sources are supported: local git repositories (first-parent history,
merge commits skipped) and a directory corpus laid out as
``<id>/buggy/<path>`` and ``<id>/fixed/<path>`` with an optional
``<id>/message`` file.
"""
from __future__ import annotations

import hashlib
import logging
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

FIX_WORDS = ("fix", "solve")
BUG_WORDS = ("bug", "issue", "problem", "error")
RECORD_FILE = "pairs.tsv"
BLOB_DIR = "blobs"


class IngestionError(ValueError):
    """A commit record is malformed; ``field`` names the offending field."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


def is_bug_fix_message(message):
    """True iff the message mentions a fix word and a bug word (any case, substrings)."""
    text = (message or "").lower()
    return any(w in text for w in FIX_WORDS) and any(w in text for w in BUG_WORDS)


@dataclass(frozen=True)
class ChangedFile:
    path: str
    pre: str | None
    post: str


@dataclass
class CommitRecord:
    repo_id: str
    commit_id: str
    message: str
    changed_files: list
    timestamp: int = 0

    def __post_init__(self):
        for name in ("repo_id", "commit_id"):
            if not isinstance(getattr(self, name), str) or not getattr(self, name):
                raise IngestionError(name, "must be a non-empty string")
        if not isinstance(self.message, str):
            raise IngestionError("message", "must be text")
        if not self.changed_files:
            raise IngestionError("changed_files", "must be non-empty")
        files = []
        for entry in self.changed_files:
            if not isinstance(entry, ChangedFile):
                try:
                    entry = ChangedFile(*entry)
                except TypeError as exc:
                    raise IngestionError("changed_files", f"bad entry {entry!r}") from exc
            if not isinstance(entry.path, str) or not entry.path:
                raise IngestionError("changed_files.path", "must be a non-empty string")
            if entry.post is None:
                raise IngestionError("changed_files.post", f"missing post-commit content for {entry.path}")
            files.append(entry)
        paths = [f.path for f in files]
        if len(set(paths)) != len(paths):
            raise IngestionError("changed_files.path", "paths must be unique within a commit")
        self.changed_files = files


@dataclass(frozen=True)
class FilePair:
    repo_id: str
    commit_id: str
    path: str
    buggy_source: str
    fixed_source: str


@dataclass
class MinerConfig:
    ext: str = ".java"
    max_changed_files: int = 5
    jobs: int = 1
    require_message: bool = False
    skipped: list = field(default_factory=list)


def extract_file_pairs(commit, max_changed_files=5, ext=".java"):
    """File pairs of a bug-fixing commit, or [] when the commit is discarded.

    A commit is discarded when it changes more than ``max_changed_files``
    source files or creates a source file.  Unchanged contents are skipped.
    """
    if not isinstance(commit, CommitRecord):
        raise IngestionError("commit", f"expected a CommitRecord, got {type(commit).__name__}")
    sources = [f for f in commit.changed_files if f.path.endswith(ext)]
    if len(sources) > max_changed_files:
        return []
    if any(f.pre is None for f in sources):
        return []
    return [FilePair(commit.repo_id, commit.commit_id, f.path, f.pre, f.post)
            for f in sources if f.pre != f.post]


# -- git repositories ---------------------------------------------------------

def _git(repo, *args):
    out = subprocess.run(["git", "-C", str(repo), *args], capture_output=True, check=True)
    return out.stdout


def _decode(blob):
    if blob is None:
        return None
    if b"\x00" in blob:
        raise UnicodeDecodeError("utf-8", blob, 0, 1, "binary content")
    return blob.decode("utf-8")


def _show(repo, rev, path):
    return _git(repo, "show", f"{rev}:{path}")


def _git_commits(repo):
    raw = _git(repo, "log", "--first-parent", "--no-merges", "--reverse", "--format=%H%x00%P%x00%ct%x00%B%x1e")
    for chunk in raw.decode("utf-8", "replace").split("\x1e"):
        chunk = chunk.strip("\n")
        if not chunk:
            continue
        sha, parents, ts, message = chunk.split("\x00", 3)
        yield sha, parents.split()[:1], int(ts), message


def _git_changed_files(repo, sha, parent, ext):
    if parent:
        raw = _git(repo, "diff-tree", "-r", "-M", "--no-commit-id", "--name-status", "-z", parent[0], sha)
    else:
        raw = _git(repo, "diff-tree", "-r", "--root", "--no-commit-id", "--name-status", "-z", sha)
    parts = raw.decode("utf-8", "replace").split("\x00")
    files = []
    i = 0
    while i < len(parts) and parts[i]:
        status = parts[i]
        if status[0] in "RC":
            old, new = parts[i + 1], parts[i + 2]
            i += 3
        else:
            old = new = parts[i + 1]
            i += 2
        if not new.endswith(ext) and not old.endswith(ext):
            continue
        kind = status[0]
        if kind == "D":
            # deleted files have no fixed version; they still count as changed
            files.append((new, "deleted"))
            continue
        try:
            post = _decode(_show(repo, sha, new))
            pre = None if kind in "AC" else _decode(_show(repo, parent[0], old))
        except UnicodeDecodeError:
            files.append((new, "undecodable"))
            continue
        files.append(ChangedFile(new, pre, post))
    return files


def _walk_git(repo, config):
    repo = Path(repo)
    repo_id = repo.resolve().name
    try:
        commits = list(_git_commits(repo))
    except (subprocess.CalledProcessError, OSError) as exc:
        logger.warning("skipping unreadable repository %s: %s", repo, exc)
        return []
    out = []
    for idx, (sha, parent, ts, message) in enumerate(commits):
        if not is_bug_fix_message(message):
            continue
        try:
            changed = _git_changed_files(repo, sha, parent, config.ext)
        except (subprocess.CalledProcessError, OSError, IndexError, ValueError) as exc:
            logger.warning("skipping corrupt commit %s in %s: %s", sha, repo, exc)
            continue
        n_changed = len(changed)
        files = [f for f in changed if isinstance(f, ChangedFile)]
        if n_changed > config.max_changed_files or not files:
            continue
        record = CommitRecord(repo_id, sha, message, files, ts)
        out.extend(((ts, idx, p.path), p) for p in extract_file_pairs(record, config.max_changed_files, config.ext))
    out.sort(key=lambda item: item[0])
    return [p for _, p in out]


# -- directory corpus ---------------------------------------------------------

def _read_text(path):
    try:
        return _decode(path.read_bytes())
    except (UnicodeDecodeError, OSError):
        return None


def _walk_corpus(root, config):
    root = Path(root)
    repo_id = root.resolve().name
    out = []
    for entry in sorted(p for p in root.iterdir() if p.is_dir()):
        buggy_dir, fixed_dir = entry / "buggy", entry / "fixed"
        if not fixed_dir.is_dir():
            continue
        msg_file = entry / "message"
        if msg_file.exists():
            message = msg_file.read_text(encoding="utf-8", errors="replace")
            if not is_bug_fix_message(message):
                continue
        elif config.require_message:
            continue
        else:
            message = ""
        files = []
        for post_path in sorted(fixed_dir.rglob(f"*{config.ext}")):
            rel = post_path.relative_to(fixed_dir).as_posix()
            post = _read_text(post_path)
            if post is None:
                continue
            pre_path = buggy_dir / rel
            pre = _read_text(pre_path) if pre_path.exists() else None
            if pre_path.exists() and pre is None:
                continue
            files.append(ChangedFile(rel, pre, post))
        changed = [f for f in files if f.pre != f.post]
        if not changed:
            continue
        try:
            record = CommitRecord(repo_id, entry.name, message, changed)
        except IngestionError as exc:
            logger.warning("skipping corrupt corpus entry %s: %s", entry, exc)
            continue
        out.extend(extract_file_pairs(record, config.max_changed_files, config.ext))
    return out


def _walk_one(root, config):
    root = Path(root)
    if not root.is_dir():
        logger.warning("skipping unreadable root %s", root)
        return []
    if (root / ".git").exists():
        return _walk_git(root, config)
    return _walk_corpus(root, config)


def walk_repositories(roots, config=None):
    """Yield FilePairs from every root in (repo, commit time, path) order.

    Roots are processed in sorted order; with ``config.jobs > 1`` they are
    walked concurrently and the per-root results merged in that same order.
    """
    config = config or MinerConfig()
    roots = sorted(str(r) for r in roots)
    if config.jobs > 1 and len(roots) > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda r: _walk_one(r, config), roots))
    else:
        results = [_walk_one(r, config) for r in roots]
    for pairs in results:
        yield from pairs


# -- record files -------------------------------------------------------------

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


def blob_ref(content):
    return hashlib.sha256(content.encode("utf-8")).hexdigest()


def write_file_pairs(pairs, out_dir):
    """Write ``pairs.tsv`` plus content-addressed blobs; returns the count."""
    out = Path(out_dir)
    (out / BLOB_DIR).mkdir(parents=True, exist_ok=True)
    lines = []
    for p in pairs:
        refs = []
        for content in (p.buggy_source, p.fixed_source):
            ref = blob_ref(content)
            blob = out / BLOB_DIR / ref
            if not blob.exists():
                blob.write_bytes(content.encode("utf-8"))
            refs.append(ref)
        lines.append("\t".join(_escape(x) for x in (p.repo_id, p.commit_id, p.path, *refs)))
    (out / RECORD_FILE).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return len(lines)


def read_file_pairs(out_dir):
    out = Path(out_dir)
    pairs = []
    for n, line in enumerate((out / RECORD_FILE).read_text(encoding="utf-8").splitlines(), start=1):
        fields = [_unescape(x) for x in line.split("\t")]
        if len(fields) != 5:
            raise IngestionError("record", f"line {n} has {len(fields)} fields, expected 5")
        repo_id, commit_id, path, bref, fref = fields
        buggy = (out / BLOB_DIR / bref).read_text(encoding="utf-8")
        fixed = (out / BLOB_DIR / fref).read_text(encoding="utf-8")
        pairs.append(FilePair(repo_id, commit_id, path, buggy, fixed))
    return pairs
