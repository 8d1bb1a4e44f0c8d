"""Exceptions raised by rdfinterval.

Every error derives from :class:`RdfIntervalError` so the command line can
report it uniformly, and from the closest builtin so callers that catch
``ValueError`` or ``KeyError`` keep working.
"""


class RdfIntervalError(Exception):
    """Base class for all rdfinterval errors."""


class MalformedLineError(RdfIntervalError, ValueError):
    """An N-Triples line could not be parsed."""

    def __init__(self, line_number, reason):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"Line {line_number}: {reason}")


class InvalidAxiomError(RdfIntervalError, ValueError):
    """A schema triple does not form a valid axiom."""


class SchemaError(RdfIntervalError, ValueError):
    """The schema uses a construct the encoding cannot represent."""


class EmptyHierarchyError(RdfIntervalError, ValueError):
    """A hierarchy has no entities to encode."""


class WidthOverflowError(RdfIntervalError, ValueError):
    """Codes need more bits than the configured maximum width."""


class UnknownEntityError(RdfIntervalError, KeyError):
    """An axiom references an IRI without a code."""


class FormatError(RdfIntervalError, ValueError):
    """A serialized file is corrupt or has an unexpected layout."""


class UnknownSchemaTermError(RdfIntervalError, KeyError):
    """A predicate or rdf:type object has no code in the TBox encoding."""


class NotFoundError(RdfIntervalError, KeyError):
    """A dictionary lookup (locate or extract) failed."""


class UnknownConceptError(RdfIntervalError, KeyError):
    """A concept identifier is not present in the concept table."""


class QuerySyntaxError(RdfIntervalError, ValueError):
    """Query text does not follow the supported grammar."""

    def __init__(self, position, reason):
        self.position = position
        self.reason = reason
        super().__init__(f"Position {position}: {reason}")


class UnsupportedFeatureError(RdfIntervalError, ValueError):
    """Query uses a SPARQL feature outside the supported subset."""


class PlanError(RdfIntervalError, ValueError):
    """A query cannot be planned (for example a namespace conflict)."""


class UnsupportedDatasetError(RdfIntervalError, ValueError):
    """The dataset's encoding or state does not support the operation."""
