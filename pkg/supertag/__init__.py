"""
Dynamic-window CCG supertagger.

Taggers (MLP, Elman/Jordan RNNs, forward and stacked bidirectional LSTMs)
read context windows whose slots are weighted by learned logistic filter
gates, trained with per-sentence SGD on hand-derived gradients.
"""

from .categories import parse_category, print_category
from .corpus import load_corpus
from .models import build_model
from .networks import ModelConfig
from .serialization import load_model, serialize_model
from .training import TrainConfig, train_loop

__all__ = [
    "parse_category", "print_category", "load_corpus", "build_model", "ModelConfig",
    "load_model", "serialize_model", "TrainConfig", "train_loop",
]
