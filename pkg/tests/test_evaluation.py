import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nmtrepair.dataset import BugFixPair, dedup_and_split
from nmtrepair.evaluation import (
    REPORT_COLUMNS,
    coverage_from_counts,
    evaluate,
    is_perfect,
    operation_coverage,
    operation_sets,
    perfect_prediction_rate,
    prediction_rate,
    prefix_success_counts,
    syntactic_correctness,
)
from nmtrepair.lexabs import AbstractedMethod, IdMapping
from nmtrepair.seq2seq import ModelConfig, Seq2SeqModel
from nmtrepair.treediff import EditAction


def test_published_rate_arithmetic():
    assert round(100 * prediction_rate(538, 5835), 2) == 9.22


def test_published_coverage_arithmetic():
    assert coverage_from_counts(168, 600) == pytest.approx(0.28)


def test_rate_edge_cases():
    assert prediction_rate(0, 0) == 0.0
    with pytest.raises(ValueError):
        prediction_rate(3, 2)


def test_is_perfect_is_exact_match():
    assert is_perfect([("a", "b"), ("a",)], AbstractedMethod(("a",)))
    assert not is_perfect([("a", "b")], ("a", "b", "c"))


@pytest.mark.parametrize("cands, expected", [
    ([], 1.0),
    ([("int", "METHOD_1", "(", ")", "{", "return", "INT_1", ";", "}")], 1.0),
    ([("int", "METHOD_1", "(", ")", "{", "return", "INT_1", ";")], 0.0),
    ([("void", "METHOD_1", "(", ")", "{", "}"), ("{",)], 0.5),
])
def test_syntactic_correctness(cands, expected):
    assert syntactic_correctness(cands) == expected


# -- operation coverage -----------------------------------------------------------

OPS = [
    EditAction("Update", "Literal", "Return", 3, new_label="1"),
    EditAction("Delete", "Invocation", "Block", 2),
    EditAction("Update", "VariableRead", "BinaryOperator", 4, new_label="x"),
    EditAction("Insert", "If", "Block", 9, parent_id=1, position=0, label=""),
]


def pair_with(ops, tag):
    return BugFixPair(AbstractedMethod((tag, "b")), AbstractedMethod((tag, "f")), list(ops), IdMapping())


def test_full_coverage_when_everything_is_learned():
    pairs = [pair_with(OPS[:2], "a"), pair_with(OPS[2:], "b")]
    assert operation_coverage(pairs, pairs) == (1.0, 1.0)


def test_partial_coverage():
    pairs = [pair_with(OPS[:1], "a"), pair_with(OPS[1:3], "b"), pair_with(OPS[:2], "c")]
    coverage, theoretical = operation_coverage(pairs[:1], pairs)
    assert coverage == pytest.approx(1 / 3)
    assert theoretical == pytest.approx(1 / 3)
    sets = operation_sets(pairs[:1], pairs)
    assert sets.learned == {("Update", "Literal", "Return")}


def test_coverage_of_empty_sets():
    assert operation_coverage([], []) == (0.0, 0.0)


@given(st.lists(st.sets(st.integers(0, len(OPS) - 1), min_size=1), min_size=1, max_size=12), st.data())
def test_theoretical_coverage_bounds_perfect_rate(op_sets, data):
    pairs = [pair_with([OPS[i] for i in sorted(s)], f"p{n}") for n, s in enumerate(op_sets)]
    chosen = data.draw(st.sets(st.integers(0, len(pairs) - 1)))
    perfect = [pairs[i] for i in sorted(chosen)]
    coverage, theoretical = operation_coverage(perfect, pairs)
    assert theoretical >= len(perfect) / len(pairs)
    assert 0.0 <= coverage <= 1.0


# -- end-to-end evaluation ----------------------------------------------------------

@pytest.fixture(scope="module")
def bundle(synthetic_pairs):
    return dedup_and_split(synthetic_pairs[:60], seed=0)


@pytest.fixture(scope="module")
def model(bundle):
    cfg = ModelConfig(hidden_units=6, embedding_dim=4, decoder_layers=1, vocabulary_size=len(bundle.vocabulary))
    return Seq2SeqModel(cfg, seed=0)


def fake_clock():
    counter = itertools.count()
    return lambda: next(counter) * 0.5


def test_evaluate_report_is_deterministic(bundle, model):
    pairs = bundle.test
    first = evaluate(model, pairs, bundle.vocabulary, beams=(2, 1), max_len=5, clock=fake_clock())
    second = evaluate(model, pairs, bundle.vocabulary, beams=(1, 2), max_len=5, clock=fake_clock())
    assert first.to_csv() == second.to_csv()
    assert first.to_csv().splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert [r["beam"] for r in first.rows] == [1, 2]
    assert first.timing[0]["mean_time_per_bug"] == pytest.approx(0.5)
    assert "beam" in first.format_table()
    for r in first.rows:
        assert r["theoretical_bug_coverage"] >= r["perfect_rate"]


def test_untranslatable_inputs_are_counted(bundle, model):
    odd = BugFixPair(AbstractedMethod(("never_seen",)), AbstractedMethod(("x",)), OPS[:1], IdMapping())
    report = evaluate(model, [odd] + bundle.test[:2], bundle.vocabulary, beams=(1,), max_len=3)
    row = report.row(1)
    assert row["untranslatable"] == 1 and row["total"] == 3
    count, rate = perfect_prediction_rate([odd], model, 1, bundle.vocabulary, max_len=3)
    assert (count, rate) == (0, 0.0)


def test_beam_widths_must_be_positive(bundle, model):
    with pytest.raises(ValueError):
        evaluate(model, bundle.test, bundle.vocabulary, beams=(0,))


def test_prefix_success_counts_are_monotone(bundle, model):
    # make the fixed side of every pair equal to a candidate the model produces
    from nmtrepair.decode import beam_decode

    pairs = []
    for i, p in enumerate(bundle.test):
        cands = beam_decode(model, tuple(p.buggy), 4, max_len=4, vocabulary=bundle.vocabulary).candidates
        target = cands[i % len(cands)]
        pairs.append(BugFixPair(p.buggy, target if tuple(target) != tuple(p.buggy) else p.fixed,
                                p.actions, p.mapping))
    counts = prefix_success_counts(model, pairs, bundle.vocabulary, 4, (1, 2, 3, 4), max_len=4)
    values = [counts[w] for w in (1, 2, 3, 4)]
    assert values == sorted(values)
    assert values[-1] >= 1
