"""Package exception types, grouped by failure category for CLI exit codes."""

from __future__ import annotations


class IodaSimError(Exception):
    """Base class for all package errors."""


class ConfigError(IodaSimError):
    """Invalid or inconsistent scenario configuration."""


class RolloutFormatError(IodaSimError):
    """Malformed rollout/trajectory file or invariant violation on load."""


class CollectionError(IodaSimError):
    """A collected rollout was non-optimal (misconfigured policy/env pairing)."""


class PipelineError(IodaSimError):
    """Control-loop components were assembled over different references or metrics."""
