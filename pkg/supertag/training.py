"""
Online SGD training, 1-best accuracy and dev-set model selection.

Parameters are updated after every sentence with plain SGD (no momentum,
no clipping, constant rate). The snapshot with the highest dev accuracy is
kept as the final model.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np
import pandas as pd

from .corpus import build_charset, build_vocab_tagset
from .errors import ConfigError, CorpusError
from .models import build_model
from .networks import ModelConfig
from .numerics import nll_loss, spawn_rngs
from .options import get_architecture_name
from .synthetic import generate_corpus

logger = logging.getLogger(__name__)

__all__ = ["TrainConfig", "TrainState", "nll_loss", "sgd_epoch", "evaluate_accuracy",
           "accuracy_counts", "train_loop", "history_frame", "save_history",
           "dynamic_window_experiment"]

HISTORY_COLUMNS = ["epoch", "train_loss", "dev_acc"]


@dataclass
class TrainConfig:
    learning_rate: float = 0.02
    epochs: int = 40
    seed: int = 0
    shuffle: bool = True
    min_word_count: int = 1
    min_tag_count: int = 1
    model: ModelConfig = field(default_factory=ModelConfig)

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError("must be > 0", "learning_rate")
        if self.epochs < 0:
            raise ConfigError("must be >= 0", "epochs")
        for name in ("min_word_count", "min_tag_count"):
            if getattr(self, name) < 1:
                raise ConfigError("must be >= 1", name)


@dataclass
class TrainState:
    epoch: int = 0
    train_losses: List[float] = field(default_factory=list)
    dev_accuracies: List[float] = field(default_factory=list)
    best_dev_acc: float = float("-inf")
    best_epoch: int = 0
    best_params: Optional[dict] = None

    def record(self, epoch, train_loss, dev_acc, params):
        self.epoch = epoch
        self.train_losses.append(train_loss)
        self.dev_accuracies.append(dev_acc)
        if dev_acc > self.best_dev_acc:
            self.best_dev_acc = dev_acc
            self.best_epoch = epoch
            self.best_params = params()

    @property
    def history(self):
        return [{"epoch": i + 1, "train_loss": loss, "dev_acc": acc}
                for i, (loss, acc) in enumerate(zip(self.train_losses, self.dev_accuracies))]


def sgd_epoch(model, train, config, rng, learning_rate=None):
    """One pass of per-sentence SGD; returns the mean training loss.

    ``learning_rate`` overrides ``config.learning_rate`` (0 leaves the model unchanged).
    """
    lr = config.learning_rate if learning_rate is None else learning_rate
    order = rng.permutation(len(train)) if config.shuffle else np.arange(len(train))
    total = 0.0
    for i in order:
        loss, grads, _ = model.loss_and_grads(train[i], "train", rng)
        if lr:
            model.apply_gradients(grads, lr)
        total += loss
    return total / max(len(train), 1)


def accuracy_counts(model, data):
    """(correct, total) token counts; gold tags unknown to the model never count as correct."""
    correct = total = 0
    rare = model.tagset.rare_id
    for sentence in data:
        encoded = model.encode(sentence)
        predicted = model.predict(encoded)
        correct += int(np.sum((predicted == encoded.tags) & (encoded.tags != rare)))
        total += len(encoded)
    return correct, total


def evaluate_accuracy(model, data):
    if not data:
        raise CorpusError("cannot evaluate on an empty data set")
    correct, total = accuracy_counts(model, data)
    return correct / total


def train_loop(config, train, dev, model=None, embeddings=None,
               evaluate: Optional[Callable] = None, on_epoch: Optional[Callable] = None):
    """Train for ``config.epochs`` epochs and restore the best-dev snapshot.

    ``evaluate(model, dev)`` defaults to ``evaluate_accuracy``; ``on_epoch``
    is called with each history row.
    """
    if not train:
        raise CorpusError("empty training set")
    if not dev:
        raise CorpusError("empty development set")
    evaluate = evaluate or evaluate_accuracy
    init_rng, train_rng = spawn_rngs(config.seed, 2)
    if model is None:
        vocab, tagset = build_vocab_tagset(train, config.min_word_count, config.min_tag_count)
        charset = build_charset(train)
        model = build_model(config.model, vocab, charset, tagset, rng=init_rng,
                            embeddings=embeddings)
    logger.info("Training %s tagger with %d parameters on %d sentences",
                get_architecture_name(model.config.architecture), model.parameter_count(),
                len(train))

    state = TrainState()
    for epoch in range(1, config.epochs + 1):
        loss = sgd_epoch(model, train, config, train_rng)
        acc = evaluate(model, dev)
        state.record(epoch, loss, acc, model.snapshot)
        logger.info("epoch %d: train loss %.4f, dev accuracy %.4f", epoch, loss, acc)
        if on_epoch is not None:
            on_epoch(state.history[-1])

    if state.best_params is not None:
        model.restore(state.best_params)
        logger.info("Best dev accuracy %.4f at epoch %d", state.best_dev_acc, state.best_epoch)
    return model, state


def history_frame(state):
    return pd.DataFrame(state.history, columns=HISTORY_COLUMNS)


def save_history(state, path):
    history_frame(state).to_csv(path, index=False)


def dynamic_window_experiment(config, seeds, train_size=200, dev_size=100, distractor_rate=0.3):
    """Matched runs with and without filter gates on distractor-injected synthetic corpora.

    Returns one row per seed with the best dev accuracy of each setting.
    """
    rows = []
    for seed in seeds:
        train = generate_corpus(train_size, seed=seed, distractor_rate=distractor_rate)
        dev = generate_corpus(dev_size, seed=10_000 + seed, distractor_rate=distractor_rate)
        row = {"seed": seed}
        for label, use_gates in (("dyn", True), ("no_dyn", False)):
            run = replace(config, seed=seed, model=replace(config.model, use_gates=use_gates))
            model, state = train_loop(run, train, dev)
            row[label] = state.best_dev_acc if state.dev_accuracies else evaluate_accuracy(model, dev)
        logger.info("seed %d: dyn %.4f, no dyn %.4f", seed, row["dyn"], row["no_dyn"])
        rows.append(row)
    return pd.DataFrame(rows, columns=["seed", "dyn", "no_dyn"])
