import math

import numpy as np
import pandas as pd
import pytest

from supertag.cli import gate_table
from supertag.corpus import Sentence
from supertag.errors import ConfigError, CorpusError
from supertag.features import FeatureConfig
from supertag.inputs import get_inputs
from supertag.networks import ModelConfig
from supertag.numerics import make_rng
from supertag.synthetic import acceptance_corpus
from supertag.training import (TrainConfig, TrainState, accuracy_counts,
                               dynamic_window_experiment, evaluate_accuracy, history_frame,
                               nll_loss, save_history, sgd_epoch, train_loop)

from tests.helpers import ACCEPTANCE_FLAGS, tiny_config, tiny_corpus, tiny_model


def test_nll_loss_values():
    probs = np.array([[0.5, 0.5], [0.25, 0.75]])
    assert nll_loss(probs, [0, 1]) == pytest.approx(-(math.log(0.5) + math.log(0.75)) / 2)
    assert nll_loss(np.full((3, 10), 0.1), [0, 4, 9]) == pytest.approx(math.log(10))
    assert nll_loss(np.array([[1.0, 0.0]]), [0]) == 0.0
    assert math.isfinite(nll_loss(np.array([[1.0, 0.0]]), [1]))
    with pytest.raises(ValueError):
        nll_loss(probs, [0])


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ConfigError):
        TrainConfig(epochs=-1)
    with pytest.raises(ConfigError):
        TrainConfig(min_tag_count=0)


def test_zero_learning_rate_leaves_model_unchanged():
    model = tiny_model("bilstm")
    before = model.snapshot()
    sgd_epoch(model, tiny_corpus(), TrainConfig(), make_rng(0), learning_rate=0.0)
    for name, value in before.items():
        assert np.array_equal(model.params[name], value), name


@pytest.mark.parametrize("architecture", ["mlp", "jordan", "lstm"])
def test_sgd_is_deterministic(architecture):
    runs = []
    for _ in range(2):
        model = tiny_model(architecture)
        loss = sgd_epoch(model, tiny_corpus(), TrainConfig(), make_rng(7))
        runs.append((loss, model.params))
    assert runs[0][0] == runs[1][0]
    for name, value in runs[0][1].items():
        assert np.array_equal(runs[1][1][name], value), name


def test_update_touches_only_lookup_rows_of_the_sentence():
    model = tiny_model("elman", drop_rate=0.0)
    sentence = tiny_corpus()[1]
    before = model.snapshot()
    _, grads, _ = model.loss_and_grads(sentence, "train", make_rng(0))
    model.apply_gradients(grads, 0.5)
    untouched = {"cats", "bark"} - set(sentence.words)
    assert untouched
    for word in untouched:
        row = model.vocab.id(word)
        assert np.array_equal(model.params["L_w"][row], before["L_w"][row])
    for word in sentence.words:
        row = model.vocab.id(word)
        assert not np.array_equal(model.params["L_w"][row], before["L_w"][row])


@pytest.mark.parametrize("architecture", ["mlp", "elman", "jordan", "lstm", "bilstm"])
def test_small_step_does_not_increase_the_loss(architecture):
    model = tiny_model(architecture)
    sentence = tiny_corpus()[2]
    loss, grads, _ = model.loss_and_grads(sentence, "test")
    model.apply_gradients(grads, 1e-5)
    assert model.loss(sentence, "test") <= loss


def test_one_sentence_overfit_with_mlp():
    sentence = tiny_corpus()[0]
    config = TrainConfig(learning_rate=0.2, epochs=200, shuffle=False,
                         model=tiny_config("mlp", drop_rate=0.0, hidden_drop_rate=0.0))
    model = tiny_model("mlp", drop_rate=0.0, hidden_drop_rate=0.0)
    rng = make_rng(0)
    losses = [sgd_epoch(model, [sentence], config, rng) for _ in range(config.epochs)]
    decreasing = sum(b < a for a, b in zip(losses, losses[1:]))
    assert decreasing >= 0.95 * (len(losses) - 1)
    assert evaluate_accuracy(model, [sentence]) == 1.0


def _constant_model(tag_id):
    model = tiny_model("mlp")
    model.params["W_hy"][...] = 0.0
    model.params["b_y"][...] = 0.0
    model.params["b_y"][tag_id] = 10.0
    return model


def test_constant_tagger_scores_the_tag_frequency():
    model = _constant_model(1)
    assert model.tagset.symbol(1) == "N"
    gold = [
        Sentence.from_pairs([("dogs", "N"), ("IBM", "NP"), ("cats", "N"), ("Bark", "NP"),
                             ("IBM", "NP")]),
        Sentence.from_pairs([("dogs", "N"), ("IBM", "NP"), ("dogs", "N"), ("IBM", "NP"),
                             ("IBM", "NP")]),
    ]
    assert accuracy_counts(model, gold) == (4, 10)
    assert evaluate_accuracy(model, gold) == pytest.approx(0.4)


def test_unseen_gold_tags_always_count_wrong():
    model = _constant_model(0)
    assert model.tagset.rare_id == 0
    gold = [Sentence.from_pairs([("dogs", "S"), ("cats", "S[dcl]")])]
    assert accuracy_counts(model, gold) == (0, 2)


def test_evaluate_rejects_empty_data():
    with pytest.raises(CorpusError):
        evaluate_accuracy(tiny_model("mlp"), [])


def test_train_loop_with_zero_epochs_returns_initial_model():
    config = TrainConfig(epochs=0, model=tiny_config("mlp"))
    model, state = train_loop(config, tiny_corpus(), tiny_corpus())
    assert state.history == []
    assert state.best_params is None
    assert model.parameter_count() > 0


def test_train_loop_is_reproducible_for_a_seed():
    config = TrainConfig(epochs=2, learning_rate=0.1, seed=3, model=tiny_config("jordan"))
    first, first_state = train_loop(config, tiny_corpus(), tiny_corpus())
    second, second_state = train_loop(config, tiny_corpus(), tiny_corpus())
    assert first_state.history == second_state.history
    assert set(first.params) == set(second.params)
    for name, value in first.params.items():
        assert np.array_equal(second.params[name], value), name


def test_train_loop_keeps_best_dev_snapshot():
    model = tiny_model("mlp")
    scores = iter([0.3, 0.9, 0.7])
    snapshots = []
    config = TrainConfig(epochs=3, learning_rate=0.1, model=tiny_config("mlp"))
    model, state = train_loop(config, tiny_corpus(), tiny_corpus(), model=model,
                              evaluate=lambda m, dev: next(scores),
                              on_epoch=lambda row: snapshots.append(model.snapshot()))
    assert state.best_epoch == 2
    assert state.best_dev_acc == 0.9
    assert [row["dev_acc"] for row in state.history] == [0.3, 0.9, 0.7]
    for name, value in snapshots[1].items():
        assert np.array_equal(model.params[name], value), name
    assert not np.array_equal(snapshots[1]["W_hy"], snapshots[2]["W_hy"])


def test_ties_keep_the_earlier_epoch():
    state = TrainState()
    state.record(1, 1.0, 0.5, dict)
    state.record(2, 0.8, 0.5, dict)
    assert state.best_epoch == 1


def test_history_csv(tmp_path):
    state = TrainState()
    state.record(1, 1.25, 0.5, dict)
    state.record(2, 0.75, 0.625, dict)
    path = tmp_path / "history.csv"
    save_history(state, path)
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["epoch", "train_loss", "dev_acc"]
    assert frame["epoch"].tolist() == [1, 2]
    assert frame["dev_acc"].tolist() == [0.5, 0.625]
    assert history_frame(TrainState()).empty


def test_dynamic_window_experiment_table():
    config = TrainConfig(epochs=1, model=tiny_config("mlp"))
    table = dynamic_window_experiment(config, [0, 1], train_size=4, dev_size=3)
    assert list(table.columns) == ["seed", "dyn", "no_dyn"]
    assert table["seed"].tolist() == [0, 1]
    assert table[["dyn", "no_dyn"]].apply(lambda c: c.between(0.0, 1.0)).all().all()


def acceptance_config(window_radius=None, epochs=40):
    features = FeatureConfig(word_dim=16, cap_dim=2, char_dim=4, chars_per_side=2,
                             window_radius=window_radius)
    model = ModelConfig(architecture="bilstm", gate_variant="scalar", hidden_size=32,
                        drop_rate=0.5, hidden_drop_rate=0.0, init_scale=1.0, features=features)
    return TrainConfig(learning_rate=0.1, epochs=epochs, seed=0, model=model)


def test_documented_acceptance_flags_match_the_acceptance_config():
    flags = dict(zip(ACCEPTANCE_FLAGS[::2], ACCEPTANCE_FLAGS[1::2]))
    values = {flag[2:].replace("-", "_"): value for flag, value in flags.items()}
    assert get_inputs(None, values).train == acceptance_config()


def test_default_rates_are_not_the_acceptance_rates():
    config = acceptance_config()
    defaults = TrainConfig()
    assert config.learning_rate > defaults.learning_rate
    assert config.model.init_scale > defaults.model.init_scale
    assert config.model.hidden_drop_rate == 0.0


def test_bilstm_overfits_the_acceptance_corpus():
    corpus = acceptance_corpus()
    model, state = train_loop(acceptance_config(), corpus, corpus)
    assert state.best_dev_acc >= 0.99
    assert evaluate_accuracy(model, corpus) == state.best_dev_acc


@pytest.mark.slow
def test_gates_focus_on_nearby_words():
    corpus = acceptance_corpus()
    model, _ = train_loop(acceptance_config(window_radius=4), corpus, corpus)
    table = gate_table(model, [s.surfaces for s in corpus])
    near = table[["offset_-1", "offset_+0", "offset_+1"]].to_numpy().mean()
    far = table[["offset_-4", "offset_-3", "offset_+3", "offset_+4"]].to_numpy().mean()
    assert near > far


@pytest.mark.slow
def test_dynamic_window_beats_plain_window_with_distractors():
    config = acceptance_config(window_radius=4, epochs=15)
    table = dynamic_window_experiment(config, range(5), train_size=200, dev_size=100,
                                      distractor_rate=0.3)
    assert table["dyn"].mean() - table["no_dyn"].mean() >= 0.02
