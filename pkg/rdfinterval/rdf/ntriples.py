"""Streaming N-Triples reader and writer.

Lines are read one at a time and handed to rdflib's W3C N-Triples
parser, so memory use is bounded by the longest line rather than the file
size. A file may be cut at line boundaries and parsed by independent
workers.
"""
import gzip
import logging
from dataclasses import dataclass
from pathlib import Path
from rdflib import BNode, Literal, URIRef
from rdflib.exceptions import ParserError
from rdflib.plugins.parsers.ntriples import (
    W3CNTriplesParser,
    r_literal,
    r_nodeid,
    unquote,
)
from ..errors import MalformedLineError
from .terms import Triple, from_rdflib


_LOGGER = logging.getLogger(__name__)
COMMENT = "#"
GZIP_SUFFIX = ".gz"


@dataclass
class ParseStats:
    """Counters filled in while parsing.

    :param int lines:  lines read (including blank and comment lines)
    :param int triples:  triples produced
    :param int skipped:  malformed lines skipped in lenient mode
    """

    lines: int = 0
    triples: int = 0
    skipped: int = 0


class _LineSink:
    """Keeps the last triple reported by the parser."""

    def __init__(self):
        self.found = None

    def triple(self, s, p, o):
        self.found = (s, p, o)


class LineParser(W3CNTriplesParser):
    """W3C N-Triples parser working on single lines.

    Blank node labels are kept as written and literals keep their exact
    lexical form (``"01"^^xsd:int`` is not normalized to ``"1"``).
    """

    def __init__(self):
        super().__init__(sink=_LineSink())

    def nodeid(self, bnode_context=None):
        if self.peek("_"):
            return BNode(self.eat(r_nodeid).group(1))
        return False

    def literal(self):
        if not self.peek('"'):
            return False
        lexical, language, datatype = self.eat(r_literal).groups()
        if datatype:
            datatype = URIRef(unquote(datatype))
        return Literal(
            unquote(lexical),
            lang=language or None,
            datatype=datatype or None,
            normalize=False,
        )

    def parse_line(self, line) -> Triple:
        """Parse one statement line.

        :param str line:  line without the trailing newline
        :returns:  parsed triple
        :raises ValueError:  with the reason on malformed input
        """
        self.sink.found = None
        self.line = line
        try:
            self.parseline()
        except ParserError as error:
            raise ValueError(str(error))
        if self.sink.found is None:
            err = "Expected a statement."
            raise ValueError(err)
        return Triple(*(from_rdflib(node) for node in self.sink.found))

    def parse_term(self, text):
        """Parse a single term.

        :param str text:  term text
        :returns:  parsed term
        :raises ValueError:  if the text is not exactly one term
        """
        self.line = text.strip()
        try:
            node = self.object()
        except ParserError as error:
            raise ValueError(str(error))
        if node is False or self.line.strip():
            err = f"Not an N-Triples term: {text!r}."
            raise ValueError(err)
        return from_rdflib(node)


def parse_term(text):
    """Parse a single N-Triples term.

    :param str text:  term text, e.g. ``<http://a>``, ``_:b0`` or
        ``"v"@en``
    :returns:  parsed term
    :raises ValueError:  if the text is not a single valid term
    """
    return LineParser().parse_term(text)


def parse_ntriples(stream, strict=True, stats=None):
    """Parse N-Triples statements.

    :param stream:  binary stream or iterable of lines (bytes or str)
    :param bool strict:  abort on the first malformed line; otherwise
        skip and count it
    :param ParseStats stats:  optional counters updated while parsing
    :returns:  generator of triples in file order
    :raises MalformedLineError:  in strict mode
    """
    if stats is None:
        stats = ParseStats()
    parser = LineParser()
    for line_number, raw in enumerate(stream, start=1):
        stats.lines += 1
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as error:
                reason = f"Invalid UTF-8: {error}."
                if strict:
                    raise MalformedLineError(line_number, reason)
                stats.skipped += 1
                _LOGGER.debug(f"Skipping line {line_number}: {reason}")
                continue
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith(COMMENT):
            continue
        try:
            triple = parser.parse_line(line)
        except ValueError as error:
            if strict:
                raise MalformedLineError(line_number, str(error))
            stats.skipped += 1
            _LOGGER.debug(f"Skipping line {line_number}: {error}")
            continue
        stats.triples += 1
        yield triple
    if stats.skipped:
        _LOGGER.warning(
            f"Skipped {stats.skipped} malformed lines of {stats.lines}."
        )


def read_ntriples(path, strict=True, stats=None):
    """Parse an N-Triples file (optionally GZIPped).

    :param path:  file path; ``.gz`` files are decompressed on the fly
    :param bool strict:  abort on malformed lines
    :param ParseStats stats:  optional counters
    :returns:  generator of triples
    """
    path = Path(path)
    _LOGGER.debug(f"Reading N-Triples from {path}.")
    opener = gzip.open if path.suffix == GZIP_SUFFIX else open
    with opener(path, "rb") as ntriples_file:
        yield from parse_ntriples(ntriples_file, strict=strict, stats=stats)


def serialize_ntriples(triples) -> bytes:
    """Serialize triples as N-Triples.

    :param triples:  iterable of triples
    :returns:  UTF-8 encoded N-Triples text
    """
    return "".join(f"{triple.n3()}\n" for triple in triples).encode("utf-8")


def write_ntriples(triples, stream) -> int:
    """Write triples to a binary stream one line at a time.

    :param triples:  iterable of triples
    :param stream:  binary stream open for writing
    :returns:  number of triples written
    """
    count = 0
    for triple in triples:
        stream.write(f"{triple.n3()}\n".encode("utf-8"))
        count += 1
    return count
