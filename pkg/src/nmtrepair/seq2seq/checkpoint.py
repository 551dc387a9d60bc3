"""Checkpoint container: a zip of ``.npy`` tensors plus a JSON header.

The archive is readable with ``numpy.load`` and is written with fixed zip
timestamps so identical parameters produce identical bytes.
"""
from __future__ import annotations

import hashlib
import io
import json
import zipfile

import numpy as np

from .model import ModelConfig, Seq2SeqModel

FORMAT = "nmtrepair-checkpoint"
VERSION = 1
_EPOCH = (1980, 1, 1, 0, 0, 0)


class CheckpointError(ValueError):
    pass


def vocabulary_hash(tokens):
    h = hashlib.sha256()
    for tok in tokens:
        h.update(tok.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def _add(zf, name, payload):
    info = zipfile.ZipInfo(name, date_time=_EPOCH)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    zf.writestr(info, payload)


def save_checkpoint(path, model, vocabulary, meta=None):
    """Write ``model`` with its vocabulary (list of tokens) to ``path``."""
    tokens = list(vocabulary)
    if len(tokens) != model.config.vocabulary_size:
        raise CheckpointError(
            f"vocabulary has {len(tokens)} tokens but the model expects {model.config.vocabulary_size}")
    header = {
        "format": FORMAT,
        "version": VERSION,
        "config": model.config.to_dict(),
        "vocabulary": tokens,
        "vocabulary_hash": vocabulary_hash(tokens),
        "parameters": sorted(model.params),
        "meta": meta or {},
    }
    with zipfile.ZipFile(path, "w") as zf:
        _add(zf, "header.json", json.dumps(header, sort_keys=True, indent=1).encode("utf-8"))
        for name in sorted(model.params):
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.ascontiguousarray(model.params[name]), allow_pickle=False)
            _add(zf, f"param/{name}.npy", buf.getvalue())


def load_checkpoint(path):
    """Return (model, vocabulary tokens, meta) from a checkpoint file."""
    try:
        zf = zipfile.ZipFile(path)
    except (OSError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"cannot open checkpoint {path}: {exc}") from exc
    with zf:
        try:
            header = json.loads(zf.read("header.json").decode("utf-8"))
        except KeyError:
            raise CheckpointError(f"{path} has no header") from None
        if header.get("format") != FORMAT:
            raise CheckpointError(f"{path} is not a {FORMAT} file")
        if header.get("version") != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")
        tokens = header["vocabulary"]
        if vocabulary_hash(tokens) != header["vocabulary_hash"]:
            raise CheckpointError("vocabulary hash mismatch")
        params = {}
        for name in header["parameters"]:
            with zf.open(f"param/{name}.npy") as fh:
                params[name] = np.lib.format.read_array(io.BytesIO(fh.read()), allow_pickle=False)
    config = ModelConfig.from_dict(header["config"])
    return Seq2SeqModel(config, params=params), tokens, header.get("meta", {})
