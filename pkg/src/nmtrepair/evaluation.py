"""Patch-quality metrics: perfect predictions, syntax, operation coverage, timing."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field

from .dataset.vocab import OutOfVocabulary
from .decode import beam_decode
from .lexabs import concretize_placeholder
from .treediff import is_valid_method

DEFAULT_BEAMS = (1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50)
REPORT_COLUMNS = ("beam", "perfect_count", "total", "perfect_rate", "syntactic_correct_rate",
                  "operation_coverage", "theoretical_bug_coverage", "untranslatable")
TIMING_COLUMNS = ("beam", "mean_time_per_bug", "mean_time_per_patch")


def prediction_rate(count, total):
    """``count / total``; zero for an empty test set."""
    if count < 0 or total < 0 or count > total:
        raise ValueError(f"invalid counts {count}/{total}")
    return count / total if total else 0.0


def is_perfect(candidates, fixed):
    target = tuple(fixed)
    return any(tuple(c) == target for c in candidates)


def perfect_prediction_rate(test, model, k, vocabulary, max_len=None):
    """(count, rate) of test pairs whose fixed method is among the top-k patches."""
    count = 0
    for pair in test:
        try:
            patches = beam_decode(model, tuple(pair.buggy), k, max_len=max_len, vocabulary=vocabulary)
        except OutOfVocabulary:
            continue
        count += is_perfect(patches.candidates, pair.fixed)
    return count, prediction_rate(count, len(test))


def syntactic_correctness(candidates):
    """Fraction of candidates that lex and parse as a method.

    IDs are replaced by placeholder lexemes first, so only the shape of the
    code matters.  An empty candidate list scores 1.0.
    """
    candidates = list(candidates)
    if not candidates:
        return 1.0
    valid = 0
    for cand in candidates:
        try:
            text = concretize_placeholder(tuple(cand))
        except ValueError:
            continue
        valid += is_valid_method(text)
    return valid / len(candidates)


@dataclass
class OperationSets:
    learned: set
    overall: set

    def __post_init__(self):
        if not self.learned <= self.overall:
            raise ValueError("learned operations must be a subset of the overall set")


def operation_sets(perfect_pairs, all_pairs):
    overall = set()
    for p in all_pairs:
        overall |= p.operations()
    learned = set()
    for p in perfect_pairs:
        learned |= p.operations()
    return OperationSets(learned, overall)


def operation_coverage(perfect_pairs, all_pairs):
    """(|M_A| / |O_A|, fraction of pairs whose operations all lie in M_A).

    Operations are (kind, node_type, context_type) triples.
    """
    all_pairs = list(all_pairs)
    sets = operation_sets(perfect_pairs, all_pairs)
    coverage = len(sets.learned) / len(sets.overall) if sets.overall else 0.0
    covered = sum(1 for p in all_pairs if p.operations() <= sets.learned)
    theoretical = covered / len(all_pairs) if all_pairs else 0.0
    return coverage, theoretical


def coverage_from_counts(learned, overall):
    return prediction_rate(learned, overall)


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)
    timing: list = field(default_factory=list)

    def row(self, k):
        for r in self.rows:
            if r["beam"] == k:
                return r
        raise KeyError(k)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            writer.writerow({c: _fmt(r[c]) for c in REPORT_COLUMNS})
        return buf.getvalue()

    def timing_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=TIMING_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.timing:
            writer.writerow({c: _fmt(r[c]) for c in TIMING_COLUMNS})
        return buf.getvalue()

    def format_table(self):
        timing = {r["beam"]: r for r in self.timing}
        lines = [f"{'beam':>5} {'perfect':>12} {'rate':>8} {'syntax':>8} {'op_cov':>8} {'bug_cov':>8} "
                 f"{'s/bug':>9} {'s/patch':>9}"]
        for r in self.rows:
            t = timing.get(r["beam"], {})
            lines.append(
                f"{r['beam']:>5} {r['perfect_count']:>5}/{r['total']:<6} {r['perfect_rate']:>8.2%} "
                f"{r['syntactic_correct_rate']:>8.2%} {r['operation_coverage']:>8.2%} "
                f"{r['theoretical_bug_coverage']:>8.2%} {t.get('mean_time_per_bug', float('nan')):>9.4f} "
                f"{t.get('mean_time_per_patch', float('nan')):>9.4f}")
        return "\n".join(lines)


def _fmt(v):
    return f"{v:.6f}" if isinstance(v, float) else v


def evaluate(model, pairs, vocabulary, beams=DEFAULT_BEAMS, max_len=None, clock=time.perf_counter):
    """Decode every pair at every beam width and compute the report rows.

    Pairs whose buggy side uses tokens outside ``vocabulary`` are counted
    in ``total`` and reported as untranslatable.
    """
    pairs = list(pairs)
    beams = sorted(set(int(k) for k in beams))
    if not beams or beams[0] < 1:
        raise ValueError("beam widths must be positive")
    report = EvalReport()
    for k in beams:
        perfect, candidates, untranslatable = [], [], 0
        elapsed, n_patches = 0.0, 0
        for pair in pairs:
            start = clock()
            try:
                patches = beam_decode(model, tuple(pair.buggy), k, max_len=max_len, vocabulary=vocabulary)
            except OutOfVocabulary:
                untranslatable += 1
                continue
            elapsed += clock() - start
            n_patches += len(patches)
            candidates.extend(patches.candidates)
            if is_perfect(patches.candidates, pair.fixed):
                perfect.append(pair)
        coverage, theoretical = operation_coverage(perfect, pairs)
        report.rows.append({
            "beam": k,
            "perfect_count": len(perfect),
            "total": len(pairs),
            "perfect_rate": prediction_rate(len(perfect), len(pairs)),
            "syntactic_correct_rate": syntactic_correctness(candidates),
            "operation_coverage": coverage,
            "theoretical_bug_coverage": theoretical,
            "untranslatable": untranslatable,
        })
        decoded = len(pairs) - untranslatable
        report.timing.append({
            "beam": k,
            "mean_time_per_bug": elapsed / decoded if decoded else 0.0,
            "mean_time_per_patch": elapsed / n_patches if n_patches else 0.0,
        })
    return report


def timing_profile(model, test, beam_schedule, vocabulary, max_len=None):
    """Mean decode seconds per bug and per generated patch for each beam width."""
    return evaluate(model, test, vocabulary, beam_schedule, max_len=max_len).timing


def prefix_success_counts(model, pairs, vocabulary, k_max, widths, max_len=None):
    """Successes within the top-k' prefix of one width-``k_max`` decode."""
    counts = dict.fromkeys(widths, 0)
    for pair in pairs:
        try:
            patches = beam_decode(model, tuple(pair.buggy), k_max, max_len=max_len, vocabulary=vocabulary)
        except OutOfVocabulary:
            continue
        for w in widths:
            counts[w] += is_perfect(patches.candidates[:w], pair.fixed)
    return counts


def external_eval(model, external_bundle, vocabulary, beams=DEFAULT_BEAMS, max_len=None):
    """Evaluate on another dataset built with the same abstraction and idioms."""
    pairs = external_bundle.test or list(external_bundle)
    return evaluate(model, pairs, vocabulary, beams, max_len=max_len)
