"""
Lookup tables for the tagger architectures, filter-gate variants and
dropout targets.
"""

from enum import Enum


class Architecture(Enum):
    MLP = "mlp"
    ELMAN = "elman"
    JORDAN = "jordan"
    LSTM = "lstm"
    BILSTM = "bilstm"


class GateVariant(Enum):
    SCALAR_CONCAT = "scalar"
    ELEMENTWISE = "elementwise"
    TWO_LAYER = "two_layer"
    WEIGHTED_AVERAGE = "average"


class DropoutTarget(Enum):
    GATES = "gates"
    EMBEDDINGS = "embeddings"
    NONE = "none"


# Per-architecture defaults. Recurrent models read a radius-1 window.
ARCHITECTURE_PROPERTIES = {
    Architecture.MLP: {
        'name': 'Windowed MLP',
        'window_radius': 4,
        'depth': 1,
        'recurrent': False,
    },
    Architecture.ELMAN: {
        'name': 'Elman RNN with reset gate',
        'window_radius': 1,
        'depth': 1,
        'recurrent': True,
    },
    Architecture.JORDAN: {
        'name': 'Jordan RNN with reset gate',
        'window_radius': 1,
        'depth': 1,
        'recurrent': True,
    },
    Architecture.LSTM: {
        'name': 'Forward LSTM',
        'window_radius': 1,
        'depth': 1,
        'recurrent': True,
    },
    Architecture.BILSTM: {
        'name': 'Stacked bidirectional LSTM',
        'window_radius': 1,
        'depth': 2,
        'recurrent': True,
    },
}

GATE_VARIANT_PROPERTIES = {
    GateVariant.SCALAR_CONCAT: {
        'name': 'One layer, one gate per window slot',
        'slot_valued': True,
    },
    GateVariant.ELEMENTWISE: {
        'name': 'One layer, one gate per input dimension',
        'slot_valued': False,
    },
    GateVariant.TWO_LAYER: {
        'name': 'Two-layer gate network, one gate per window slot',
        'slot_valued': True,
    },
    GateVariant.WEIGHTED_AVERAGE: {
        'name': 'Gate-weighted average of window slots',
        'slot_valued': True,
    },
}


def get_architecture_options():
    """Return the list of available architecture names."""
    return [arch.value for arch in ARCHITECTURE_PROPERTIES]


def get_gate_variant_options():
    """Return the list of available gate variant names."""
    return [variant.value for variant in GATE_VARIANT_PROPERTIES]


def get_architecture_properties(architecture):
    """Return the defaults dict for an architecture (enum or name)."""
    try:
        architecture = Architecture(architecture)
    except ValueError:
        raise ValueError(f"Unknown architecture: {architecture}") from None
    return ARCHITECTURE_PROPERTIES[architecture]


def get_gate_variant_properties(variant):
    try:
        variant = GateVariant(variant)
    except ValueError:
        raise ValueError(f"Unknown gate variant: {variant}") from None
    return GATE_VARIANT_PROPERTIES[variant]


def get_architecture_name(architecture):
    """Return the display name for an architecture."""
    try:
        return get_architecture_properties(architecture)['name']
    except ValueError:
        return str(architecture)
