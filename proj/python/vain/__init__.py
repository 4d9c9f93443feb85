"""Multi-agent interaction models: VAIN, CommNet, interaction networks.

Thin wrapper over the C++ core. `make_model` builds a model from keyword
arguments; everything else re-exports the extension module.
"""

import json as _json

from ._vain import (  # noqa: F401
    Model,
    __version__,
    attention_pool,
    count_encoder_evals,
    extract_mpp,
    generate_balls,
    load_model,
    parse_pgn,
    perft,
    selfplay_pgn,
    softmax,
)

_DEFAULT_SPEC = {
    "arch": "vain",
    "feature_dim": 4,
    "n_slots": 0,
    "es_hidden": [32, 32],
    "es_out": 16,
    "ec_hidden": [32, 32],
    "comm_dim": 16,
    "attn_dim": 10,
    "psi_hidden": [16, 16],
    "dec_hidden": [32, 32],
    "out_dim": 4,
    "head": "regression",
    "kernel": "softmax",
    "aggregation": "mean",
    "batchnorm": False,
    "absent_flag_index": -1,
    "seed": 0,
}


def make_model(**kwargs):
    """Build a Model from spec fields; unknown fields raise KeyError."""
    spec = dict(_DEFAULT_SPEC)
    for key, value in kwargs.items():
        if key not in spec:
            raise KeyError(f"unknown spec field: {key}")
        spec[key] = value
    return Model(_json.dumps(spec))
