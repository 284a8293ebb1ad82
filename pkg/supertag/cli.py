"""
Command-line interface.

    python main.py train --config run.cfg --epochs 10
    python main.py tag model.txt sentences.txt
    python main.py eval model.txt gold.txt
    python main.py gates model.txt sentences.txt --output gates.csv
    python main.py gradcheck --architecture jordan --gate-variant two_layer
    python main.py cat parse "(S\\NP)/NP"
    python main.py generate --count 50 --output toy.txt
    python main.py experiment --seeds 5 --epochs 15

Exit status: 0 success, 1 usage or configuration error, 2 data error,
3 failed gradient check.
"""

import argparse
import logging
import sys

import pandas as pd

from .categories import category_arity, parse_category, print_category, validate_tagset
from .corpus import build_charset, build_vocab_tagset, load_corpus, load_embeddings, write_corpus
from .dynwin import is_slot_valued
from .errors import (CategoryParseError, ConfigError, CorpusError, DimensionError,
                     GradientCheckError, ModelFormatError)
from .features import FeatureConfig
from .gradcheck import DEFAULT_THRESHOLD, compare_grads
from .inputs import add_config_arguments, flag_values, get_inputs
from .models import build_model
from .networks import ModelConfig
from .numerics import make_rng
from .options import Architecture, GateVariant, get_architecture_options, get_gate_variant_options
from .serialization import load_model, serialize_model
from .synthetic import generate_corpus
from .training import (dynamic_window_experiment, evaluate_accuracy, save_history,
                       train_loop)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CHECK_FAILED = 3

DATA_ERRORS = (CorpusError, CategoryParseError, ModelFormatError, DimensionError, OSError)

# Tiny models have gradients near 1e-8 where central differences keep only a few digits.
GRADCHECK_FLOOR = 1e-6


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_surfaces(path):
    """Lines of space-separated tokens; blank lines come back as empty lists."""
    with open(path, encoding="utf-8") as f:
        return [line.split() for line in f]


# -- commands ---------------------------------------------------------------

def cmd_train(args):
    run = get_inputs(args.config, flag_values(args))
    run.require("train_path", "dev_path")
    train = load_corpus(run.train_path)
    dev = load_corpus(run.dev_path)
    embeddings = None
    if run.embeddings_path:
        embeddings = load_embeddings(run.embeddings_path, run.model.features.word_dim)

    def report(row):
        print(f"{row['epoch']}\t{row['train_loss']:.6f}\t{row['dev_acc']:.4f}", flush=True)

    model, state = train_loop(run.train, train, dev, embeddings=embeddings, on_epoch=report)
    if state.dev_accuracies:
        best_acc, best_epoch = state.best_dev_acc, state.best_epoch
    else:
        best_acc, best_epoch = evaluate_accuracy(model, dev), 0
    if run.model_path:
        serialize_model(model, run.model_path)
    if run.history_path:
        save_history(state, run.history_path)
    print(f"best_dev_acc={best_acc:.4f} at epoch={best_epoch}")
    if run.test_path:
        print(f"test_acc={evaluate_accuracy(model, load_corpus(run.test_path)):.4f}")
    return EXIT_OK


def cmd_tag(args):
    model = load_model(args.model)
    for tokens in read_surfaces(args.input):
        if not tokens:
            print()
            continue
        tags = model.tag(tokens)
        print(" ".join(f"{surface}|{tag}" for surface, tag in zip(tokens, tags)))
    return EXIT_OK


def cmd_eval(args):
    model = load_model(args.model)
    gold = load_corpus(args.gold)
    if not gold:
        raise CorpusError("empty gold corpus", args.gold)
    unknown = sum(1 for s in gold for tag in s.supertags if tag not in model.tagset)
    if unknown:
        logger.warning("%d gold tokens carry tags unknown to the model; counted as errors", unknown)
    acc = evaluate_accuracy(model, gold)
    print(f"acc={acc:.4f} tokens={sum(len(s) for s in gold)}")
    return EXIT_OK


def gate_table(model, sentences, reduce=None):
    """One row per token: sentence, token, surface and the gate value of every window slot."""
    fc = model.features
    radius = fc.window_radius
    slot_valued = is_slot_valued(model.config.gate_variant)
    if not slot_valued and reduce != "mean":
        raise ConfigError("elementwise gates have one value per input dimension; "
                          "use --reduce mean for per-slot means", "gate_variant")
    columns = ["sentence", "token", "surface"] + [f"offset_{k:+d}" for k in range(-radius, radius + 1)]
    rows = []
    for i, tokens in enumerate(sentences):
        r = model.gate_activations(tokens)
        if not slot_valued:
            r = r.reshape(len(tokens), fc.slots, fc.token_dim).mean(axis=2)
        for t, surface in enumerate(tokens):
            rows.append([i, t, surface] + [float(v) for v in r[t]])
    return pd.DataFrame(rows, columns=columns)


def cmd_gates(args):
    model = load_model(args.model)
    sentences = [tokens for tokens in read_surfaces(args.input) if tokens]
    table = gate_table(model, sentences, args.reduce)
    if args.output:
        table.to_csv(args.output, index=False)
        logger.info("Wrote gate activations of %d tokens to %s", len(table), args.output)
    else:
        table.to_csv(sys.stdout, index=False)
    return EXIT_OK


def tiny_model_config(architecture, gate_variant, use_gates=True):
    """Dimensions small enough for an exhaustive finite-difference sweep."""
    features = FeatureConfig(word_dim=2, cap_dim=1, char_dim=1, chars_per_side=1, window_radius=1)
    depth = 2 if architecture is Architecture.BILSTM else 1
    return ModelConfig(architecture=architecture, gate_variant=gate_variant, use_gates=use_gates,
                       hidden_size=4, depth=depth, drop_rate=0.3, hidden_drop_rate=0.3,
                       two_layer_hidden=3, init_scale=0.5, features=features)


def cmd_gradcheck(args):
    sentences = generate_corpus(20, seed=args.seed)
    sentence = min(sentences, key=len)
    vocab, tagset = build_vocab_tagset(sentences)
    charset = build_charset(sentences)
    architectures = get_architecture_options() if args.architecture == "all" else [args.architecture]
    variants = get_gate_variant_options() if args.gate_variant == "all" else [args.gate_variant]
    failed = 0
    for architecture in architectures:
        for variant in variants:
            config = tiny_model_config(Architecture(architecture), GateVariant(variant))
            model = build_model(config, vocab, charset, tagset, rng=make_rng(args.seed))
            report = compare_grads(model, sentence, threshold=args.threshold,
                                   rng=make_rng(args.seed + 1), max_coords=args.max_coords,
                                   floor=args.floor)
            print(f"# {architecture} / {variant}")
            for line in report.lines():
                print(line)
            failed += not report.passed
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_cat(args):
    if args.action == "validate":
        with open(args.items[0], encoding="utf-8") as f:
            tags = [line.strip() for line in f if line.strip()]
        report = validate_tagset(tags)
        for tag, error in report.failures:
            print(f"FAIL\t{tag}\t{error}")
        print(report.summary())
        return EXIT_OK if report.ok else EXIT_DATA
    for text in args.items:
        cat = parse_category(text)
        if args.action == "parse":
            print(f"{print_category(cat)}\t{print_category(cat, bracket_results=True)}")
        else:
            print(f"{print_category(cat)}\t{category_arity(cat)}")
    return EXIT_OK


def cmd_generate(args):
    sentences = generate_corpus(args.count, seed=args.seed, distractor_rate=args.distractor_rate)
    if args.output:
        write_corpus(sentences, args.output)
    else:
        for sentence in sentences:
            print(" ".join(f"{tok.surface}|{tok.supertag}" for tok in sentence.tokens))
    return EXIT_OK


def cmd_experiment(args):
    run = get_inputs(args.config, flag_values(args))
    seeds = range(run.train.seed, run.train.seed + args.seeds)
    table = dynamic_window_experiment(run.train, seeds, args.train_size, args.dev_size,
                                      args.distractor_rate)
    print(table.to_csv(index=False, sep="\t", float_format="%.4f"), end="")
    print(f"mean_dyn={table['dyn'].mean():.4f} mean_no_dyn={table['no_dyn'].mean():.4f}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser():
    parser = ArgumentParser(prog="supertag", description="Dynamic-window CCG supertagger")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    train = commands.add_parser("train", help="train a tagger and keep the best dev snapshot")
    train.add_argument("--config", help="'key = value' configuration file")
    add_config_arguments(train)
    train.set_defaults(func=cmd_train)

    tag = commands.add_parser("tag", help="tag raw sentences, one per line")
    tag.add_argument("model")
    tag.add_argument("input")
    tag.set_defaults(func=cmd_tag)

    evaluate = commands.add_parser("eval", help="1-best accuracy on a gold corpus")
    evaluate.add_argument("model")
    evaluate.add_argument("gold")
    evaluate.set_defaults(func=cmd_eval)

    gates = commands.add_parser("gates", help="export per-token gate activations as CSV")
    gates.add_argument("model")
    gates.add_argument("input")
    gates.add_argument("--output", help="CSV path (default: standard output)")
    gates.add_argument("--reduce", choices=["mean"], help="per-slot mean for elementwise gates")
    gates.set_defaults(func=cmd_gates)

    check = commands.add_parser("gradcheck", help="finite-difference check on tiny models")
    check.add_argument("--architecture", default="all",
                       choices=["all"] + get_architecture_options())
    check.add_argument("--gate-variant", default="all",
                       choices=["all"] + get_gate_variant_options())
    check.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    check.add_argument("--floor", type=float, default=GRADCHECK_FLOOR,
                       help="smallest denominator of the relative error")
    check.add_argument("--max-coords", type=int, default=2000)
    check.add_argument("--seed", type=int, default=0)
    check.set_defaults(func=cmd_gradcheck)

    cat = commands.add_parser("cat", help="category utilities")
    cat.add_argument("action", choices=["parse", "validate", "arity"])
    cat.add_argument("items", nargs="+", help="category strings, or a tag file for validate")
    cat.set_defaults(func=cmd_cat)

    generate = commands.add_parser("generate", help="write a synthetic toy-CCG corpus")
    generate.add_argument("--count", type=int, default=50)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--distractor-rate", type=float, default=0.0)
    generate.add_argument("--output", help="corpus path (default: standard output)")
    generate.set_defaults(func=cmd_generate)

    experiment = commands.add_parser("experiment", help="compare taggers with and without gates")
    experiment.add_argument("--config", help="'key = value' configuration file")
    experiment.add_argument("--seeds", type=int, default=5, help="number of seeds")
    experiment.add_argument("--train-size", type=int, default=200)
    experiment.add_argument("--dev-size", type=int, default=100)
    experiment.add_argument("--distractor-rate", type=float, default=0.3)
    add_config_arguments(experiment)
    experiment.set_defaults(func=cmd_experiment)
    return parser



def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(format="%(asctime)-15s %(levelname)s %(message)s", level=level)
    try:
        return args.func(args)
    except ConfigError as e:
        logger.error("configuration error: %s", e)
        return EXIT_USAGE
    except GradientCheckError as e:
        logger.error("gradient check failed: %s", e)
        return EXIT_CHECK_FAILED
    except DATA_ERRORS as e:
        logger.error("%s", e)
        return EXIT_DATA
    except ValueError as e:
        logger.error("invalid argument: %s", e)
        return EXIT_USAGE
