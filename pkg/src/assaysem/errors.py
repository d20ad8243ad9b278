"""Shared exception types."""


class AssaysemError(Exception):
    """Base class for all package errors."""


class EmptyCorpusError(AssaysemError):
    """A corpus file yielded zero parseable records."""


class InvalidArgumentError(AssaysemError, ValueError):
    """A caller violated an operation precondition."""


class FitError(AssaysemError):
    """Model fitting could not proceed (e.g. all-empty training texts)."""


class MissingEmbeddingError(AssaysemError, KeyError):
    """An assay id is absent from an external embedding table."""


class EmbeddingFormatError(AssaysemError):
    """An embedding file is malformed (ragged rows, NaNs, bad JSON)."""


class ConsistencyError(AssaysemError):
    """Internal model state does not satisfy its invariants."""


class DepositorParseError(AssaysemError):
    """A depositor response document could not be parsed."""


class UnsupportedSourceError(AssaysemError):
    """No ingestion profile exists for the requested depositor source."""
