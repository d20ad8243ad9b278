"""Bioassay semantification engine.

Turns free-text bioassay descriptions into sets of ontology-derived
property/value statements by clustering text vectors, evaluates the
approach against a gold corpus, and exposes the trained semantifier
through an HTTP curation service with knowledge-graph export.
"""

from assaysem.corpus import BioassayRecord, Corpus, FoldSplit, Statement

__all__ = ["Statement", "BioassayRecord", "Corpus", "FoldSplit"]

__version__ = "0.1.0"
