"""Multiplication-table counts, divisor-chain geometry and density predictions."""

import json

from ._multab import (
    DomainError,
    InvalidArgument,
    OutOfRange,
    ResourceLimit,
    UnsupportedDimension,
    alpha_r,
    alpha_seq,
    count_a,
    count_h,
    gr_sum,
    l_volume,
    predict,
    q,
    qr_exact,
    run_suite,
    slab_prob,
    solve_alpha,
    tau_chain,
)
from ._multab import run_experiment as _run_experiment


def run_experiment(config, with_meta=True):
    """Run an experiment from a config dict (or JSON string); returns a list of records."""
    if not isinstance(config, str):
        config = json.dumps(config)
    return _run_experiment(config, with_meta)


__all__ = [
    "DomainError",
    "InvalidArgument",
    "OutOfRange",
    "ResourceLimit",
    "UnsupportedDimension",
    "alpha_r",
    "alpha_seq",
    "count_a",
    "count_h",
    "gr_sum",
    "l_volume",
    "predict",
    "q",
    "qr_exact",
    "run_experiment",
    "run_suite",
    "slab_prob",
    "solve_alpha",
    "tau_chain",
]
