"""Business survival prediction from location, mobility, attributes and reviews."""

import json
import os

from ._bizsurv import (
    ConfigError,
    DataError,
    Error,
    ExplainRequest,
    LockedError,
    MissingArtifactError,
    haversine,
    polarity,
    preprocess,
    roc_auc,
    stages,
    version,
)
from . import _bizsurv

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "LockedError",
    "MissingArtifactError",
    "default_config",
    "explain",
    "haversine",
    "polarity",
    "preprocess",
    "resolve_config",
    "roc_auc",
    "run_stage",
    "stages",
    "version",
]


def _overrides(workdir, seed, overrides):
    merged = dict(overrides or {})
    if workdir is not None:
        merged.setdefault("paths", {})
        merged["paths"] = dict(merged["paths"], workdir=os.fspath(workdir))
    if seed is not None:
        merged["seed"] = seed
    return json.dumps(merged)


def default_config():
    return json.loads(_bizsurv.default_config_json())


def resolve_config(workdir=None, seed=None, overrides=None, config_file=None):
    """Configuration after defaults, file, BIZSURV_ environment and overrides."""
    return json.loads(_bizsurv.resolve_config_json(_overrides(workdir, seed, overrides), config_file))


def run_stage(stage, workdir=None, seed=None, overrides=None, config_file=None):
    """Run one pipeline stage. Returns {"skipped", "outputs", "messages"}."""
    return _bizsurv.run_stage(stage, _overrides(workdir, seed, overrides), config_file)


def explain(workdir=None, business_id="", review_id="", features=None, top_k=None,
            samples=None, seed=None, format=None, overrides=None, config_file=None):
    request = ExplainRequest()
    request.business_id = business_id
    request.review_id = review_id
    request.features = features
    request.top_k = top_k
    request.samples = samples
    request.seed = seed
    request.format = format
    return _bizsurv.run_stage("explain", _overrides(workdir, None, overrides), config_file, request)
