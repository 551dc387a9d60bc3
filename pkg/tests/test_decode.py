import itertools

import numpy as np
import pytest

from conftest import small_model
from nmtrepair.dataset import Vocabulary
from nmtrepair.decode import (
    PatchSet,
    beam_decode,
    default_max_len,
    greedy_decode,
    predict_patches,
    score_sequence,
)
from nmtrepair.lexabs import AbstractedMethod, UnmappableId
from nmtrepair.seq2seq import EOS, PAD, SOS


def biased_model(bias, **kw):
    """Model whose output ignores the input: every step emits softmax(bias)."""
    model = small_model(vocabulary_size=len(bias), **kw)
    model.params["out_W"][...] = 0.0
    model.params["out_b"][...] = bias
    return model


def test_greedy_ties_go_to_lowest_index():
    model = biased_model([0, 0, -1, 3.0, 3.0, 1.0])
    assert greedy_decode(model, [3], max_len=4) == (3, 3, 3, 3)


def test_greedy_never_emits_pad_or_sos():
    model = biased_model([9.0, 9.0, 1.0, 0.0])
    assert greedy_decode(model, [3]) == ()


def test_max_len_zero_is_empty():
    model = small_model()
    assert greedy_decode(model, [3, 4], max_len=0) == ()
    patches = beam_decode(model, [3, 4], 3, max_len=0)
    assert patches.candidates == [()] and patches.complete == [False]


def test_default_max_len():
    assert default_max_len(7) == 24


def test_beam_width_must_be_positive():
    with pytest.raises(ValueError):
        beam_decode(small_model(), [3], 0)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        greedy_decode(small_model(), [])


@pytest.mark.parametrize("seed", range(20))
def test_beam_one_equals_greedy(seed):
    rng = np.random.default_rng(seed)
    model = small_model(seed=seed, init_scale=1.5)
    src = rng.integers(3, 9, rng.integers(1, 6)).tolist()
    assert beam_decode(model, src, 1).candidates[0] == greedy_decode(model, src)


def exhaustive(model, src, V, max_len):
    """Every complete and truncated output with its exact log-probability."""
    content = range(EOS + 1, V)
    out = []
    for n in range(max_len):
        for seq in itertools.product(content, repeat=n):
            out.append((score_sequence(model, src, seq, complete=True), seq + (EOS,), seq, True))
    for seq in itertools.product(content, repeat=max_len):
        out.append((score_sequence(model, src, seq, complete=False), seq, seq, False))
    out.sort(key=lambda r: (-r[0], r[1]))
    return out


@pytest.mark.parametrize("seed, max_len", [(0, 3), (1, 4), (2, 5), (3, 6)])
def test_beam_matches_exhaustive_search(seed, max_len):
    V = 5
    model = small_model(seed=seed, vocabulary_size=V, init_scale=1.0)
    src = [3, 4, 3]
    table = exhaustive(model, src, V, max_len)
    # with k at least the number of outputs nothing is ever pruned
    patches = beam_decode(model, src, len(table), max_len=max_len)
    assert patches.candidates == [r[2] for r in table]
    assert patches.complete == [r[3] for r in table]
    np.testing.assert_allclose(patches.scores, [r[0] for r in table], atol=1e-9)
    for k in (1, 3, 7):
        top = beam_decode(model, src, len(table), max_len=max_len).top(k)
        assert top.candidates == [r[2] for r in table[:k]]


@pytest.mark.parametrize("seed", range(5))
def test_scores_match_teacher_forced_rescoring(seed):
    model = small_model(seed=seed, init_scale=1.0, decoder_layers=2)
    src = [3, 5, 7, 4]
    patches = beam_decode(model, src, 6, max_len=7)
    for cand, score, done in zip(patches.candidates, patches.scores, patches.complete):
        assert score == pytest.approx(score_sequence(model, src, cand, complete=done), abs=1e-6)
    assert patches.scores == sorted(patches.scores, reverse=True)
    assert len(set(patches.candidates)) == len(patches.candidates)


def test_vocabulary_round_trip_and_patchset():
    vocab = Vocabulary(["<pad>", "<s>", "</s>", "a", "b", "c"])
    model = biased_model([0, 0, 2.0, 3.0, 0, 0])
    patches = beam_decode(model, ["a", "b"], 2, max_len=2, vocabulary=vocab)
    assert isinstance(patches, PatchSet)
    assert all(isinstance(c, AbstractedMethod) for c in patches.candidates)
    assert patches.candidates[0] == AbstractedMethod(("a", "a"))
    assert len(patches.top(1)) == 1


def test_length_normalization_prefers_longer_when_cheaper_per_token():
    model = biased_model([0, 0, 0.0, 1.0])
    raw = beam_decode(model, [3], 5, max_len=3)
    norm = beam_decode(model, [3], 5, max_len=3, length_normalize=True)
    assert raw.candidates[0] == ()
    assert norm.candidates[0] == (3, 3, 3)


def test_predict_patches_reports_unmappable_ids():
    tokens = ["<pad>", "<s>", "</s>", "(", ")", ";", "METHOD_1", "VAR_1", "VAR_9", "int", "return", "{", "}"]
    vocab = Vocabulary(tokens)
    bias = np.full(len(tokens), -5.0)
    bias[tokens.index("VAR_9")] = 5.0
    model = biased_model(bias)
    out = predict_patches(model, "int f() { return x; }", vocab, k=1, max_len=1)
    ((rank, score, cand, text),) = out
    assert rank == 1 and cand == AbstractedMethod(("VAR_9",))
    assert isinstance(text, UnmappableId) and text.ident == "VAR_9"
    bias[:] = -5.0
    bias[tokens.index("VAR_1")] = 5.0
    model = biased_model(bias)
    (row,) = predict_patches(model, "int f() { return x; }", vocab, k=1, max_len=1)
    assert row[3] == "x"


def test_predict_patches_rejects_unknown_tokens():
    vocab = Vocabulary(["<pad>", "<s>", "</s>", "x"])
    with pytest.raises(ValueError, match="outside the model vocabulary"):
        predict_patches(small_model(vocabulary_size=4), "int f() { }", vocab)


def test_banned_specials_never_appear():
    model = biased_model([50.0, 50.0, 0.0, 0.0, 0.0])
    for cand in beam_decode(model, [3], 4, max_len=3).candidates:
        assert PAD not in cand and SOS not in cand
