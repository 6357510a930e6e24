"""Asynchronous augmented Lagrangian gossip simulator."""

from pathlib import Path

from ._core import (
    ConfigError,
    ConnectivityFailure,
    DomainError,
    Error,
    KindError,
    MismatchError,
    NumericFailure,
    Supergraph,
    build_geometric,
    config_hash,
    failure_prob,
    make_complete,
    make_path,
    make_ring,
    metropolis_weights,
    oracle,
    run,
    transmissions_to,
)


def run_file(path, seed=None):
    """Run an INI config file. Relative file references are not resolved."""
    return run(Path(path).read_text(), seed=seed)


__all__ = [
    "ConfigError",
    "ConnectivityFailure",
    "DomainError",
    "Error",
    "KindError",
    "MismatchError",
    "NumericFailure",
    "Supergraph",
    "build_geometric",
    "config_hash",
    "failure_prob",
    "make_complete",
    "make_path",
    "make_ring",
    "metropolis_weights",
    "oracle",
    "run",
    "run_file",
    "transmissions_to",
]
