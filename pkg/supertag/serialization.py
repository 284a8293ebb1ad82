"""
Model files.

Versioned line-oriented text:

    supertag-model 1
    architecture = bilstm
    ...                        (every ModelConfig / FeatureConfig key)
    @words <n>                 then n lines "id<TAB>word"
    @chars <n>
    @tags <n>
    @array <name> <d1> [<d2>]  then one row per line, '%.17g' values
    @end

Values are written with 17 significant digits so reloading is bit-exact.
"""

import logging

import numpy as np

from .corpus import TagSet, Vocab
from .errors import ConfigError, DimensionError, ModelFormatError
from .inputs import (format_value, merge_values, model_config_from_values, model_config_values,
                     parse_value)
from .models import build_model

logger = logging.getLogger(__name__)

MAGIC = "supertag-model"
FORMAT_VERSION = 1


def _format_row(row):
    return " ".join(format(float(v), ".17g") for v in row)


def serialize_model(model, path):
    lines = [f"{MAGIC} {FORMAT_VERSION}"]
    for name, value in model_config_values(model.config).items():
        lines.append(f"{name} = {format_value(value)}")
    for block, vocab in (("words", model.vocab), ("chars", model.charset), ("tags", model.tagset)):
        lines.append(f"@{block} {len(vocab)}")
        lines.extend(vocab.lines())
    for name, value in model.params.items():
        lines.append(f"@array {name} {' '.join(str(d) for d in value.shape)}")
        rows = value.reshape(1, -1) if value.ndim == 1 else value
        lines.extend(_format_row(row) for row in rows)
    lines.append("@end")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    logger.info("Wrote %s model (%d parameters) to %s",
                model.config.architecture.value, model.parameter_count(), path)


class _Reader:
    def __init__(self, lines, path):
        self.lines = [line.rstrip("\n") for line in lines]
        self.path = path
        self.pos = 0

    def error(self, message):
        return ModelFormatError(f"{self.path}:{self.pos}: {message}")

    def next(self):
        if self.pos >= len(self.lines):
            raise ModelFormatError(f"{self.path}: truncated file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self, count):
        return [self.next() for _ in range(count)]


def _section_header(reader, expected):
    fields = reader.next().split()
    if len(fields) != 2 or fields[0] != "@" + expected:
        raise reader.error(f"expected '@{expected} <count>'")
    try:
        return int(fields[1])
    except ValueError:
        raise reader.error(f"bad count {fields[1]!r}") from None


def read_model_lines(lines, path="<model>", expected_architecture=None):
    reader = _Reader(lines, path)
    header = reader.next().split()
    if len(header) != 2 or header[0] != MAGIC:
        raise reader.error(f"not a model file (expected '{MAGIC} {FORMAT_VERSION}')")
    if header[1] != str(FORMAT_VERSION):
        raise reader.error(f"unsupported format version {header[1]!r}, expected {FORMAT_VERSION}")

    values = {}
    while reader.peek() is not None and not reader.peek().startswith("@"):
        line = reader.next()
        if "=" not in line:
            raise reader.error(f"expected 'key = value', got {line!r}")
        name, text = (part.strip() for part in line.split("=", 1))
        try:
            values[name] = parse_value(name, text)
        except ConfigError as e:
            raise reader.error(str(e)) from None
    try:
        config = model_config_from_values(merge_values(values))
    except (ConfigError, TypeError) as e:
        raise reader.error(f"invalid model configuration ({e})") from None
    if expected_architecture is not None and config.architecture is not expected_architecture:
        raise ModelFormatError(f"{path}: file holds a {config.architecture.value} model, "
                               f"expected {expected_architecture.value}")

    vocab = Vocab.from_lines(reader.take(_section_header(reader, "words")), path=path)
    charset = Vocab.from_lines(reader.take(_section_header(reader, "chars")), path=path)
    tagset = TagSet.from_lines(reader.take(_section_header(reader, "tags")), path=path)

    params = {}
    while True:
        fields = reader.next().split()
        if fields == ["@end"]:
            break
        if len(fields) < 3 or fields[0] != "@array":
            raise reader.error("expected '@array <name> <shape>' or '@end'")
        name = fields[1]
        try:
            shape = tuple(int(d) for d in fields[2:])
        except ValueError:
            raise reader.error(f"bad shape for {name}") from None
        rows = 1 if len(shape) == 1 else shape[0]
        width = shape[-1]
        data = []
        for _ in range(rows):
            row = reader.next().split()
            if len(row) != width:
                raise reader.error(f"{name}: expected {width} values, got {len(row)}")
            try:
                data.append([float(v) for v in row])
            except ValueError:
                raise reader.error(f"{name}: unreadable number") from None
        params[name] = np.array(data, dtype=np.float64).reshape(shape)

    model = build_model(config, vocab, charset, tagset, initialize=False)
    try:
        model.load_params(params)
    except DimensionError as e:
        raise ModelFormatError(f"{path}: payload does not match the header ({e})") from None
    return model


def load_model(path, expected_architecture=None):
    with open(path, encoding="utf-8") as f:
        model = read_model_lines(f, path, expected_architecture)
    logger.info("Loaded %s model from %s", model.config.architecture.value, path)
    return model
