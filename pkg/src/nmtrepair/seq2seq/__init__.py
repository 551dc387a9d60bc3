"""Attention encoder-decoder in numpy: model, training and checkpoints."""
from .cells import CELLS, GRUCell, LSTMCell, get_cell
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint, vocabulary_hash
from .estimator import Seq2SeqRepairer
from .model import (
    EOS,
    PAD,
    PAPER_BEST,
    SOS,
    EncoderStates,
    ModelConfig,
    Seq2SeqModel,
    log_softmax,
    masked_softmax,
    reference_grid,
    softmax,
)
from .training import (
    Checkpoint,
    TrainingDiverged,
    bucket_batches,
    corpus_loss,
    grid_search,
    make_batch,
    select_best,
    train,
)

__all__ = [
    "CELLS", "GRUCell", "LSTMCell", "get_cell", "CheckpointError", "load_checkpoint",
    "save_checkpoint", "vocabulary_hash", "Seq2SeqRepairer", "EOS", "PAD", "PAPER_BEST", "SOS",
    "EncoderStates", "ModelConfig", "Seq2SeqModel", "log_softmax", "masked_softmax", "reference_grid",
    "softmax", "Checkpoint", "TrainingDiverged", "bucket_batches", "corpus_loss", "grid_search",
    "make_batch", "select_best", "train",
]
