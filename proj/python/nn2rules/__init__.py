"""Exact rule extraction from ReLU networks over categorical features."""

from ._nn2rules import (
    Dataset,
    Error,
    InvariantViolation,
    Network,
    RuleList,
    Schema,
    evaluate,
    extract,
    load_prepared,
    random_network,
    train,
    verify,
)

__all__ = [
    "Dataset",
    "Error",
    "InvariantViolation",
    "Network",
    "RuleList",
    "Schema",
    "evaluate",
    "extract",
    "load_prepared",
    "random_network",
    "train",
    "verify",
]
