"""Command line entry point: ``nmtrepair <subcommand> ...``.

Exit status is 0 on success, 1 on user error (bad arguments, missing or
malformed inputs) and 2 on internal errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import replace
from pathlib import Path

from . import __version__

logger = logging.getLogger("nmtrepair")

DEFAULT_BEAMS = "1,5,10,15,20,25,30,35,40,45,50"


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- manifests ----------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def build_manifest(command, args, seeds=None, extra=None):
    params = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    digest = hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()[:16]
    manifest = {
        "tool": "nmtrepair",
        "version": __version__,
        "command": command,
        "arguments": params,
        "config_hash": digest,
        "seeds": seeds or {},
    }
    manifest.update(extra or {})
    return manifest


def write_manifest(path, manifest):
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _require(path, what):
    p = Path(path)
    if not p.exists():
        raise UserError(f"{what} not found: {p}")
    return p


def _load_idioms(path):
    from .lexabs import BASE_IDIOMS, read_idioms

    if path is None:
        return BASE_IDIOMS
    return read_idioms(_require(path, "idiom file"))


def _progress(i, what):
    if i and i % 1000 == 0:
        logger.info("progress %s=%d", what, i)


# -- subcommands --------------------------------------------------------------

def cmd_mine(args):
    from .miner import MinerConfig, walk_repositories, write_file_pairs

    roots = [_require(r, "root") for r in args.roots]
    config = MinerConfig(ext=args.ext, max_changed_files=args.max_files, jobs=args.jobs,
                         require_message=args.require_message)
    pairs = []
    for i, p in enumerate(walk_repositories(roots, config), start=1):
        pairs.append(p)
        _progress(i, "file_pairs")
    out = Path(args.out)
    n = write_file_pairs(pairs, out)
    write_manifest(out / "manifest", build_manifest("mine", args, extra={"file_pairs": n}))
    logger.info("mined file_pairs=%d out=%s", n, out)


def _method_pairs_path(path):
    p = _require(path, "input")
    return p / "methods.jsonl" if p.is_dir() else p


def cmd_extract(args):
    from .dataset.extract import extract_method_pairs, write_method_pairs
    from .miner import read_file_pairs

    src = _require(args.input, "mined directory")
    if not (src / "pairs.tsv").exists():
        raise UserError(f"{src} has no pairs.tsv; run 'mine' first")
    stats = Counter()
    pairs = []
    for i, mp in enumerate(extract_method_pairs(read_file_pairs(src), stats), start=1):
        pairs.append(mp)
        _progress(i, "method_pairs")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    n = write_method_pairs(pairs, out / "methods.jsonl")
    write_manifest(out / "manifest", build_manifest("extract", args, extra={"method_pairs": n,
                                                                           "stats": dict(sorted(stats.items()))}))
    logger.info("extracted method_pairs=%d out=%s", n, out)


def cmd_idioms(args):
    from .dataset.extract import read_method_pairs
    from .lexabs import BASE_IDIOMS, LexError, mine_idioms, tokenize, write_idioms

    corpus = []
    for mp in read_method_pairs(_method_pairs_path(args.input)):
        for text in (mp.buggy, mp.fixed):
            try:
                corpus.append(tokenize(text))
            except LexError:
                continue
    if not corpus:
        raise UserError("no lexable methods in the input")
    base = frozenset() if args.no_base else BASE_IDIOMS
    idioms = mine_idioms(corpus, args.top_fraction, base)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_idioms(idioms, out)
    write_manifest(out.with_name(out.name + ".manifest"), build_manifest("idioms", args, extra={"idioms": len(idioms)}))
    logger.info("idioms count=%d out=%s", len(idioms), out)


def cmd_dataset_build(args):
    from .dataset import bucket, dedup_and_split, filter_pair, make_candidate, to_pair, write_bundle
    from .dataset.extract import read_method_pairs

    idioms = _load_idioms(args.idioms)
    stats = Counter()
    selected = []
    for i, mp in enumerate(read_method_pairs(_method_pairs_path(args.input)), start=1):
        _progress(i, "candidates")
        cand = make_candidate(mp.buggy, mp.fixed, idioms, mp.provenance)
        verdict = filter_pair(cand, args.cap)
        if not verdict:
            stats[verdict.reason] += 1
            continue
        pair = to_pair(cand)
        b = bucket(pair)
        stats[f"bucket_{b}"] += 1
        if b == args.bucket:
            selected.append(pair)
    try:
        bundle = dedup_and_split(selected, args.seed, args.bucket, dict(sorted(stats.items())))
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    manifest = build_manifest("dataset build", args, seeds={"split": args.seed},
                              extra={"idioms_hash": hashlib.sha256("\n".join(sorted(idioms)).encode()).hexdigest()})
    write_bundle(bundle, args.out, manifest)
    logger.info("bundle %s out=%s", bundle.counts(), args.out)


def cmd_synth(args):
    from .dataset import MUTATIONS, generate_synthetic_corpus
    from .dataset.extract import MethodPair, write_method_pairs

    kinds = args.mutations.split(",") if args.mutations else list(MUTATIONS)
    idioms = _load_idioms(args.idioms)
    try:
        pairs = generate_synthetic_corpus(args.pairs, kinds, args.seed, pool=args.pool, idioms=idioms)
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = [MethodPair(*p.provenance[:3], p.provenance[3], p.buggy_source, p.fixed_source) for p in pairs]
    write_method_pairs(records, out / "methods.jsonl")
    corpus = out / "corpus"
    for i, p in enumerate(pairs):
        entry = corpus / f"{i:06d}"
        for side, text in (("buggy", p.buggy_source), ("fixed", p.fixed_source)):
            (entry / side).mkdir(parents=True, exist_ok=True)
            (entry / side / "Sample.java").write_text(f"class Sample {{\n{text}\n}}\n", encoding="utf-8")
        (entry / "message").write_text(f"Fix bug ({p.provenance[2]})\n", encoding="utf-8")
    write_manifest(out / "manifest", build_manifest("synth", args, seeds={"synth": args.seed},
                                                    extra={"pairs": len(pairs)}))
    logger.info("synthesized pairs=%d out=%s", len(pairs), out)


def _model_config(args, vocabulary_size):
    from .seq2seq import ModelConfig

    values = {}
    if args.config:
        values = json.loads(_require(args.config, "config file").read_text(encoding="utf-8"))
        if not isinstance(values, dict):
            raise UserError("model config file must hold a JSON object")
    overrides = {"max_epochs": args.max_epochs, "learning_rate": args.learning_rate,
                 "optimizer": args.optimizer, "batch_size": args.batch_size, "max_steps": args.max_steps}
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["vocabulary_size"] = vocabulary_size
    try:
        return ModelConfig.from_dict(values)
    except (TypeError, ValueError) as exc:
        raise UserError(f"invalid model config: {exc}") from exc


def _write_checkpoint_log(path, checkpoints):
    lines = ["epoch\tstep\ttrain_loss\tval_loss\tlearning_rate"]
    lines += [f"{c.epoch}\t{c.step}\t{c.train_loss!r}\t{c.val_loss!r}\t{c.learning_rate!r}" for c in checkpoints]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_train(args):
    from .dataset import read_bundle
    from .seq2seq import Seq2SeqModel, save_checkpoint, select_best, train

    bundle = read_bundle(_require(args.bundle, "bundle"))
    config = _model_config(args, len(bundle.vocabulary))
    print(f"effective config: {json.dumps(config.to_dict(), sort_keys=True)}", file=sys.stderr)
    model = Seq2SeqModel(config, seed=args.seed)
    checkpoints = train(model, bundle, config, seed=args.seed)
    best = select_best(checkpoints)
    model.params = best.params
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"epoch": best.epoch, "val_loss": best.val_loss, "seed": args.seed}
    save_checkpoint(out / "model.ckpt", model, bundle.vocabulary, meta)
    _write_checkpoint_log(out / "checkpoints.tsv", checkpoints)
    write_manifest(out / "manifest", build_manifest("train", args, seeds={"train": args.seed},
                                                    extra={"model_config": config.to_dict(),
                                                           "best_epoch": best.epoch}))
    logger.info("trained best_epoch=%d val_loss=%.6f out=%s", best.epoch, best.val_loss, out)


def cmd_gridsearch(args):
    from .dataset import read_bundle
    from .seq2seq import ModelConfig, Seq2SeqModel, grid_search, reference_grid, save_checkpoint

    bundle = read_bundle(_require(args.bundle, "bundle"))
    V = len(bundle.vocabulary)
    if args.grid == "reference":
        grid = reference_grid(V)
    else:
        raw = json.loads(_require(args.grid, "grid file").read_text(encoding="utf-8"))
        if not isinstance(raw, list) or not raw:
            raise UserError("grid file must hold a non-empty JSON list of configs")
        grid = [ModelConfig.from_dict({**c, "vocabulary_size": V}) for c in raw]
    if args.max_epochs is not None:
        grid = [replace(c, max_epochs=args.max_epochs) for c in grid]
    config, ckpt = grid_search(bundle, grid, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "model.ckpt", Seq2SeqModel(config, params=ckpt.params), bundle.vocabulary,
                    {"epoch": ckpt.epoch, "val_loss": ckpt.val_loss, "seed": args.seed})
    (out / "best_config.json").write_text(json.dumps(config.to_dict(), sort_keys=True, indent=2) + "\n")
    write_manifest(out / "manifest", build_manifest("gridsearch", args, seeds={"train": args.seed},
                                                    extra={"grid_size": len(grid)}))
    logger.info("gridsearch best val_loss=%.6f out=%s", ckpt.val_loss, out)


def _load_model(path):
    from .seq2seq import CheckpointError, load_checkpoint

    from .dataset import Vocabulary

    try:
        model, tokens, meta = load_checkpoint(_require(path, "model"))
    except CheckpointError as exc:
        raise UserError(str(exc)) from exc
    return model, Vocabulary(tokens), meta


def cmd_predict(args):
    from .decode import predict_patches
    from .lexabs import LexError, UnmappableId

    model, vocab, _ = _load_model(args.model)
    source = _require(args.input, "input").read_text(encoding="utf-8")
    idioms = _load_idioms(args.idioms)
    try:
        results = predict_patches(model, source, vocab, args.beam, idioms, max_len=args.max_len)
    except LexError as exc:
        raise UserError(f"cannot lex input: {exc}") from exc
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    for rank, score, cand, text in results:
        unmappable = isinstance(text, UnmappableId)
        if args.format == "jsonl":
            print(json.dumps({"rank": rank, "score": score, "abstract": str(cand),
                              "source": None if unmappable else text,
                              "unmappable": text.ident if unmappable else None}))
        else:
            print(f"# rank {rank} score {score:.6f}")
            print(f"UnmappableId({text.ident})" if unmappable else text)


def cmd_evaluate(args):
    from .dataset import read_bundle
    from .evaluation import evaluate

    model, vocab, _ = _load_model(args.model)
    bundle = read_bundle(_require(args.bundle, "bundle"))
    try:
        beams = [int(b) for b in args.beams.split(",") if b.strip()]
    except ValueError as exc:
        raise UserError(f"bad --beams value {args.beams!r}") from exc
    if not beams or min(beams) < 1:
        raise UserError("--beams must list positive integers")
    pairs = bundle.split(args.split)
    if args.limit:
        pairs = pairs[:args.limit]
    report = evaluate(model, pairs, vocab, beams, max_len=args.max_len)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.to_csv(), encoding="utf-8")
    out.with_name(out.stem + ".timing.csv").write_text(report.timing_csv(), encoding="utf-8")
    write_manifest(out.with_name(out.name + ".manifest"), build_manifest("evaluate", args))
    print(report.format_table())


# -- parser -------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="nmtrepair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nmtrepair {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="SUBCOMMAND")

    p = sub.add_parser("mine", help="select bug-fixing commits and write file pairs",
                       description="Walk git repositories or <id>/buggy|fixed corpora. Output: "
                                   "pairs.tsv (repo_id, commit_id, path, buggy_blob_ref, fixed_blob_ref) "
                                   "with blobs/<sha256> content files.")
    p.add_argument("--roots", nargs="+", required=True)
    p.add_argument("--ext", default=".java")
    p.add_argument("--max-files", type=int, default=5)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--require-message", action="store_true",
                   help="skip corpus entries without a message file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("extract", help="pair changed methods of mined file pairs",
                       description="Output: methods.jsonl, one JSON object per changed method pair.")
    p.add_argument("--in", dest="input", required=True, help="output directory of 'mine'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("idioms", help="mine frequent identifiers/literals",
                       description="Output: one idiom per line, sorted, UTF-8.")
    p.add_argument("--in", dest="input", required=True, help="methods.jsonl or its directory")
    p.add_argument("--top-fraction", type=float, default=0.00005)
    p.add_argument("--no-base", action="store_true", help="do not include the shipped base idioms")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_idioms)

    p = sub.add_parser("dataset", help="dataset operations")
    dsub = p.add_subparsers(dest="dataset_command", parser_class=_Parser, metavar="ACTION")
    d = dsub.add_parser("build", help="filter, bucket, dedup and split method pairs",
                        description="Output bundle: {train,valid,test}.{buggy,fixed,actions,meta}, "
                                    "vocab.txt, mappings/<split>/<line>.map, manifest.")
    d.add_argument("--in", dest="input", required=True, help="methods.jsonl or its directory")
    d.add_argument("--bucket", choices=("small", "medium"), default="small")
    d.add_argument("--seed", type=int, default=42)
    d.add_argument("--cap", type=int, default=10, help="per-category ID index cap")
    d.add_argument("--idioms", default=None, help="idiom file (default: shipped base list)")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_dataset_build)
    p.set_defaults(func=lambda a, parser=p: _missing_action(parser))

    p = sub.add_parser("synth", help="generate a synthetic bug-fix corpus",
                       description="Output: methods.jsonl plus corpus/<id>/{buggy,fixed}/Sample.java "
                                   "and a message file per entry (a valid 'mine' root).")
    p.add_argument("--pairs", type=int, default=2000)
    p.add_argument("--mutations", default=None, help="comma separated subset of the mutation kinds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pool", choices=("train", "heldout"), default="train")
    p.add_argument("--idioms", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    for name, helptext in (("train", "train one model configuration"),
                           ("gridsearch", "train a grid of configurations and keep the best")):
        p = sub.add_parser(name, help=helptext,
                           description="Output: model.ckpt (zip of .npy tensors with a JSON header), "
                                       "checkpoints.tsv, manifest.")
        p.add_argument("--bundle", required=True)
        if name == "train":
            p.add_argument("--config", default=None, help="JSON object of ModelConfig fields")
            p.add_argument("--learning-rate", type=float, default=None)
            p.add_argument("--optimizer", choices=("sgd", "adam"), default=None)
            p.add_argument("--batch-size", type=int, default=None)
            p.add_argument("--max-steps", type=int, default=None)
            p.set_defaults(func=cmd_train)
        else:
            p.add_argument("--grid", default="reference", help="JSON list of configs, or 'reference' for the ten-config grid")
            p.set_defaults(func=cmd_gridsearch)
        p.add_argument("--max-epochs", type=int, default=None)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--out", required=True)

    p = sub.add_parser("predict", help="generate candidate patches for one method")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="file holding one method")
    p.add_argument("--beam", type=int, default=50)
    p.add_argument("--idioms", default=None)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--format", choices=("text", "jsonl"), default="text")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="compute the evaluation report",
                       description="Output: CSV report (one row per beam width), <stem>.timing.csv "
                                   "with wall-clock columns, and a manifest.")
    p.add_argument("--model", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--beams", default=DEFAULT_BEAMS)
    p.add_argument("--split", choices=("train", "valid", "test"), default="test")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)
    return parser


def _missing_action(parser):
    parser.print_usage(sys.stderr)
    raise UserError("missing action")


def _setup_logging(verbose):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("nmtrepair:%(levelname)s:%(name)s: %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        print("nmtrepair: error: a subcommand is required", file=sys.stderr)
        return 1
    _setup_logging(args.verbose)
    try:
        args.func(args)
    except (UserError, FileNotFoundError) as exc:
        print(f"nmtrepair: error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        logger.exception("internal error")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
