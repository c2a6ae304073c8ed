"""Group evolution analysis over timestamped interaction logs."""

import json

from . import _core
from ._core import (
    PipelineError,
    detect_groups,
    link_groups,
    modified_jaccard,
    segment_slots,
    size_ratio,
    stability,
)

__all__ = [
    "PipelineError",
    "Router",
    "compute_artifact",
    "detect_groups",
    "link_groups",
    "modified_jaccard",
    "run_pipeline",
    "segment_slots",
    "size_ratio",
    "stability",
    "summary",
]


def compute_artifact(config):
    """Run ingest, detect, evolve, layout and stats; return the artifact as a dict."""
    return json.loads(_core.compute_artifact(json.dumps(config)))


def run_pipeline(config):
    """Like compute_artifact, but writes the artifact to config["output"] and returns the summary."""
    return json.loads(_core.run_pipeline(json.dumps(config)))


def summary(artifact):
    return json.loads(_core.summary(json.dumps(artifact)))


class Router:
    """The read-only HTTP API over an artifact, without a socket."""

    def __init__(self, artifact):
        self._router = _core.Router(json.dumps(artifact))

    def get(self, path, **query):
        status, body = self._router.get(path, {k: str(v) for k, v in query.items()})
        return status, json.loads(body)
