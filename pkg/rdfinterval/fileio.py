"""Restart-safe file output."""
import logging
import os
from contextlib import contextmanager
from pathlib import Path


_LOGGER = logging.getLogger(__name__)
TEMP_SUFFIX = ".partial"


@contextmanager
def atomic_open(path, mode="wt", encoding="utf-8"):
    """Open a file that only appears under its final name once complete.

    Data is written to a temporary sibling path which is renamed over
    ``path`` when the block exits without an exception.

    :param path:  final destination
    :param str mode:  ``"wt"`` or ``"wb"``
    :param str encoding:  text encoding (ignored for binary mode)
    """
    path = Path(path)
    temp_path = path.with_name(path.name + TEMP_SUFFIX)
    if "b" in mode:
        handle = open(temp_path, mode)
    else:
        handle = open(temp_path, mode, encoding=encoding, newline="\n")
    try:
        with handle:
            yield handle
    except BaseException:
        temp_path.unlink(missing_ok=True)
        raise
    os.replace(temp_path, path)
    _LOGGER.debug(f"Wrote {path}.")
