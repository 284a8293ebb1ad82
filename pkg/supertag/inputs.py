"""
Run configuration: defaults, ``key = value`` config files and command-line
flags, merged with precedence flag > file > default.

One key table drives the file parser, the generated flags and their
``--help`` text, and the config block written into model files.
"""

import logging
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Callable, Optional

from .errors import ConfigError
from .features import FeatureConfig
from .networks import ModelConfig
from .options import (Architecture, DropoutTarget, GateVariant, get_architecture_options,
                      get_gate_variant_options)
from .training import TrainConfig

logger = logging.getLogger(__name__)

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def parse_bool(text):
    value = str(text).strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(f"expected a boolean (true/false/yes/no/on/off/1/0), got {text!r}")


def _optional(convert):
    def parse(text):
        if text is None or str(text).strip().lower() in ("", "none"):
            return None
        return convert(text)
    return parse


@dataclass(frozen=True)
class Key:
    name: str
    section: str            # paths | train | model | features
    parse: Callable[[str], Any]
    default: Any
    help: str

    @property
    def flag(self):
        return "--" + self.name.replace("_", "-")


KEYS = [
    Key("train_path", "paths", _optional(str), None, "training corpus (pipe format)"),
    Key("dev_path", "paths", _optional(str), None, "development corpus used for model selection"),
    Key("test_path", "paths", _optional(str), None, "test corpus evaluated after training"),
    Key("embeddings_path", "paths", _optional(str), None, "pretrained word vectors, 'token v1 ... vn' per line"),
    Key("model_path", "paths", _optional(str), "model.txt", "where the trained model is written"),
    Key("history_path", "paths", _optional(str), "history.csv", "per-epoch history CSV"),

    Key("learning_rate", "train", float, 0.02, "SGD learning rate"),
    Key("epochs", "train", int, 40, "training epochs"),
    Key("seed", "train", int, 0, "random seed"),
    Key("shuffle", "train", parse_bool, True, "shuffle sentences every epoch"),
    Key("min_word_count", "train", int, 1, "words seen fewer times map to UNK"),
    Key("min_tag_count", "train", int, 1, "tags seen fewer times map to RARE"),

    Key("architecture", "model", Architecture, Architecture.BILSTM,
        "one of " + ", ".join(get_architecture_options())),
    Key("gate_variant", "model", GateVariant, GateVariant.SCALAR_CONCAT,
        "one of " + ", ".join(get_gate_variant_options())),
    Key("use_gates", "model", parse_bool, True, "use dynamic-window filter gates"),
    Key("hidden_size", "model", int, 512, "hidden units per layer and direction"),
    Key("depth", "model", _optional(int), None, "recurrent layers (default: per architecture)"),
    Key("drop_rate", "model", float, 0.5, "dropout rate on the dropout target"),
    Key("hidden_drop_rate", "model", float, 0.5, "dropout rate on hidden layer outputs"),
    Key("dropout_target", "model", DropoutTarget, DropoutTarget.GATES, "gates, embeddings or none"),
    Key("two_layer_hidden", "model", int, 64, "hidden width of two_layer gate networks"),
    Key("detach_gate", "model", parse_bool, False, "stop input gradients through the gate path"),
    Key("use_bias", "model", parse_bool, True, "bias terms in hidden and output layers"),
    Key("candidate_activation", "model", str, "tanh", "LSTM candidate activation (tanh or sigmoid)"),
    Key("init_scale", "model", float, 0.1, "Gaussian init standard deviation times sqrt(fan_in)"),

    Key("word_dim", "features", int, 200, "word embedding size"),
    Key("cap_dim", "features", int, 5, "capitalization embedding size"),
    Key("char_dim", "features", int, 5, "character embedding size"),
    Key("chars_per_side", "features", int, 5, "characters taken from each end of a word"),
    Key("window_radius", "features", _optional(int), None, "context radius (default: per architecture)"),
    Key("use_chars", "features", parse_bool, True, "include character embeddings"),
]

KEY_TABLE = {key.name: key for key in KEYS}


def parse_value(name, text):
    key = KEY_TABLE.get(name)
    if key is None:
        raise ConfigError("unknown configuration key", name)
    if not isinstance(text, str):
        return text
    try:
        return key.parse(text.strip())
    except ValueError as e:
        raise ConfigError(f"cannot parse {text!r} ({e})", name) from None


def format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return value.value
    return repr(value) if isinstance(value, float) else str(value)


def read_config_lines(lines, path="<config>"):
    """``key = value`` lines to typed values; '#' starts a comment."""
    values = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected 'key = value', got {line!r}")
        name, text = (part.strip() for part in line.split("=", 1))
        values[name] = parse_value(name, text)
    return values


def read_config_file(path):
    with open(path, encoding="utf-8") as f:
        return read_config_lines(f, path)


def add_config_arguments(parser):
    """One flag per key; unset flags stay absent so file values survive."""
    group = parser.add_argument_group("configuration (flag > --config file > default)")
    for key in KEYS:
        group.add_argument(key.flag, dest=key.name, default=None, metavar=key.name.upper(),
                           help=f"{key.help} (default: {format_value(key.default)})")
    return parser


def merge_values(file_values=None, flag_values=None):
    values = {key.name: key.default for key in KEYS}
    for source in (file_values or {}, flag_values or {}):
        for name, value in source.items():
            if value is not None:
                values[name] = parse_value(name, value)
    return values


def _section(values, section):
    return {key.name: values[key.name] for key in KEYS if key.section == section}


def model_config_from_values(values):
    features = FeatureConfig(**_section(values, "features"))
    return ModelConfig(features=features, **_section(values, "model"))


def model_config_values(config):
    """Flat key -> value mapping of a ModelConfig and its FeatureConfig."""
    values = {f.name: getattr(config, f.name) for f in fields(config) if f.name != "features"}
    values.update({f.name: getattr(config.features, f.name) for f in fields(config.features)})
    return values


@dataclass
class RunConfig:
    train: TrainConfig
    train_path: Optional[str] = None
    dev_path: Optional[str] = None
    test_path: Optional[str] = None
    embeddings_path: Optional[str] = None
    model_path: Optional[str] = None
    history_path: Optional[str] = None

    @property
    def model(self):
        return self.train.model

    def require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError("required but not set", name)


def get_inputs(config_path=None, flag_values=None):
    """RunConfig from an optional config file and flag overrides."""
    file_values = read_config_file(config_path) if config_path else {}
    values = merge_values(file_values, flag_values)
    train = TrainConfig(model=model_config_from_values(values), **_section(values, "train"))
    run = RunConfig(train=train, **_section(values, "paths"))
    logger.debug("Run configuration: %s", {k: format_value(v) for k, v in values.items()})
    return run


def flag_values(namespace):
    """Configuration keys actually given on the command line."""
    return {name: getattr(namespace, name) for name in KEY_TABLE
            if getattr(namespace, name, None) is not None}
