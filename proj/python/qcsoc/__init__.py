"""Python front-end for the qcsoc simulator.

Configs are plain dicts in the same schema as the CLI's JSON experiment files.
"""

import json

from ._qcsoc import (  # noqa: F401
    AssemblyError,
    ConfigError,
    assemble,
    builtin_programs,
    cos_sin,
    disassemble,
    git_blob_sha1,
)
from . import _qcsoc

__all__ = [
    "AssemblyError",
    "ConfigError",
    "assemble",
    "builtin_programs",
    "cos_sin",
    "disassemble",
    "git_blob_sha1",
    "latency",
    "run",
]


def run(config=None, base_dir="", **overrides):
    """Runs an experiment; keyword arguments override top-level config keys."""
    doc = dict(config or {})
    doc.update(overrides)
    return _qcsoc.run(json.dumps(doc), str(base_dir))


def latency(config=None, base_dir="", **overrides):
    """Decomposes the feedback latency of one shot, in cycles and ns."""
    doc = dict(config or {})
    doc.update(overrides)
    return _qcsoc.latency(json.dumps(doc), str(base_dir))
