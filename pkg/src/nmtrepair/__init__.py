"""Learn bug-fixing patches from mined buggy/fixed method pairs."""
__version__ = "0.1.0"

from .decode import PatchSet, beam_decode, greedy_decode, predict_patches
from .lexabs import MethodAbstractor
from .seq2seq import ModelConfig, Seq2SeqModel, Seq2SeqRepairer

__all__ = [
    "__version__", "PatchSet", "beam_decode", "greedy_decode", "predict_patches",
    "MethodAbstractor", "ModelConfig", "Seq2SeqModel", "Seq2SeqRepairer",
]
