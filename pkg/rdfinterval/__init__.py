"""Interval-encoded RDF dictionaries with RDFS-aware query answering."""
from importlib import metadata


try:
    __version__ = metadata.version("rdfinterval")
except metadata.PackageNotFoundError:
    __version__ = "unknown"
