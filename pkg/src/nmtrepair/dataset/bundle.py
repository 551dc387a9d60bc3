"""Deduplication, seeded 80/10/10 splitting and the on-disk bundle layout."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..lexabs import AbstractedMethod, dump_mapping, load_mapping
from ..treediff import EditAction
from .pairs import BugFixPair
from .vocab import Vocabulary

SPLITS = ("train", "valid", "test")
MIN_PAIRS = 10


@dataclass
class DatasetBundle:
    bucket: str
    train: list
    validation: list
    test: list
    vocabulary: Vocabulary
    seed: int | None = None
    stats: dict = field(default_factory=dict)

    def split(self, name):
        return {"train": self.train, "valid": self.validation, "validation": self.validation,
                "test": self.test}[name]

    def __iter__(self):
        return iter(self.train + self.validation + self.test)

    def counts(self):
        return {"train": len(self.train), "valid": len(self.validation), "test": len(self.test)}


def dedup(pairs):
    """Keep the first occurrence of every (buggy, fixed) token-sequence pair."""
    seen = set()
    out = []
    for p in pairs:
        if p.key not in seen:
            seen.add(p.key)
            out.append(p)
    return out


def split_sizes(n, ratios=(0.8, 0.1, 0.1)):
    n_train = math.floor(n * ratios[0] + 0.5)
    n_val = math.floor(n * ratios[1] + 0.5)
    return n_train, n_val, n - n_train - n_val


def dedup_and_split(pairs, seed, bucket=None, stats=None):
    """Remove duplicate pairs, shuffle with ``seed`` and split 80/10/10."""
    unique = dedup(pairs)
    if len(unique) < MIN_PAIRS:
        raise ValueError(f"need at least {MIN_PAIRS} unique pairs to split, got {len(unique)}")
    order = np.random.default_rng(seed).permutation(len(unique))
    shuffled = [unique[i] for i in order]
    n_train, n_val, _ = split_sizes(len(shuffled))
    train = shuffled[:n_train]
    val = shuffled[n_train:n_train + n_val]
    test = shuffled[n_train + n_val:]
    vocab = Vocabulary.from_sequences(seq for p in shuffled for seq in (p.buggy, p.fixed))
    stats = dict(stats or {})
    stats["duplicates_removed"] = len(pairs) - len(unique)
    return DatasetBundle(bucket or "small", train, val, test, vocab, seed, stats)


def _meta_line(pair):
    return json.dumps({
        "provenance": list(pair.provenance),
        "buggy_source": pair.buggy_source,
        "fixed_source": pair.fixed_source,
    }, sort_keys=True)


def write_bundle(bundle, out_dir, manifest=None):
    """Write the bundle directory; returns the manifest dict written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in SPLITS:
        pairs = bundle.split(name)
        (out / f"{name}.buggy").write_text("".join(f"{p.buggy}\n" for p in pairs), encoding="utf-8")
        (out / f"{name}.fixed").write_text("".join(f"{p.fixed}\n" for p in pairs), encoding="utf-8")
        (out / f"{name}.actions").write_text(
            "".join(json.dumps([a.to_line() for a in p.actions]) + "\n" for p in pairs), encoding="utf-8")
        (out / f"{name}.meta").write_text("".join(_meta_line(p) + "\n" for p in pairs), encoding="utf-8")
        mdir = out / "mappings" / name
        mdir.mkdir(parents=True, exist_ok=True)
        for old in mdir.glob("*.map"):
            old.unlink()
        for i, p in enumerate(pairs):
            (mdir / f"{i}.map").write_text(dump_mapping(p.mapping), encoding="utf-8")
    bundle.vocabulary.write(out / "vocab.txt")
    info = {
        "bucket": bundle.bucket,
        "seed": bundle.seed,
        "counts": bundle.counts(),
        "vocabulary_size": len(bundle.vocabulary),
        "filter_stats": bundle.stats,
    }
    info.update(manifest or {})
    (out / "manifest").write_text(json.dumps(info, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return info


def _lines(path):
    return path.read_text(encoding="utf-8").splitlines() if path.exists() else []


def read_split(out, name):
    buggy = _lines(out / f"{name}.buggy")
    fixed = _lines(out / f"{name}.fixed")
    actions = _lines(out / f"{name}.actions")
    meta = _lines(out / f"{name}.meta")
    if len(buggy) != len(fixed):
        raise ValueError(f"{name}.buggy and {name}.fixed have different line counts")
    pairs = []
    for i, (b, f) in enumerate(zip(buggy, fixed)):
        acts = [EditAction.from_line(a) for a in json.loads(actions[i])] if i < len(actions) else []
        info = json.loads(meta[i]) if i < len(meta) else {}
        mpath = out / "mappings" / name / f"{i}.map"
        mapping = load_mapping(mpath.read_text(encoding="utf-8")) if mpath.exists() else load_mapping("")
        pairs.append(BugFixPair(AbstractedMethod.from_string(b), AbstractedMethod.from_string(f), acts,
                                mapping, tuple(info.get("provenance", ())),
                                info.get("buggy_source"), info.get("fixed_source")))
    return pairs


def read_bundle(out_dir):
    out = Path(out_dir)
    if not (out / "vocab.txt").exists():
        raise FileNotFoundError(f"{out} is not a dataset bundle (no vocab.txt)")
    manifest = {}
    if (out / "manifest").exists():
        manifest = json.loads((out / "manifest").read_text(encoding="utf-8"))
    return DatasetBundle(
        manifest.get("bucket", "small"),
        read_split(out, "train"),
        read_split(out, "valid"),
        read_split(out, "test"),
        Vocabulary.read(out / "vocab.txt"),
        manifest.get("seed"),
        manifest.get("filter_stats", {}),
    )
