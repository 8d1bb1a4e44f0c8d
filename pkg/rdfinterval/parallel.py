"""Data-parallel helpers over logical partitions.

A partition is a pandas object processed by one worker. Workers share no
mutable state; the only synchronization points are the barriers built
from :func:`run_partitions` (gather) and :func:`shuffle` (exchange).
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
import numpy as np
import pandas as pd


_LOGGER = logging.getLogger(__name__)


def run_partitions(func, partitions, workers=None) -> list:
    """Apply a function to every partition on a worker pool.

    :param func:  function of one partition
    :param list partitions:  partitions to process
    :param int workers:  maximum number of threads (default: cores)
    :returns:  results in partition order
    """
    partitions = list(partitions)
    workers = min(workers or os.cpu_count() or 1, len(partitions))
    if workers <= 1:
        return [func(part) for part in partitions]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, partitions))


def bucket_ids(obj, buckets) -> np.ndarray:
    """Assign rows to hash buckets.

    The hash is pandas' fixed-key row hash, so assignments are stable
    across processes and runs.

    :param obj:  Series or DataFrame whose values are hashed
    :param int buckets:  number of buckets
    :returns:  bucket index per row
    """
    if len(obj) == 0:
        return np.zeros(0, dtype=np.int64)
    hashes = pd.util.hash_pandas_object(obj, index=False).to_numpy()
    return (hashes % np.uint64(buckets)).astype(np.int64)


def hash_split(obj, buckets, columns=None) -> list:
    """Split a partition into hash buckets.

    :param obj:  Series or DataFrame
    :param int buckets:  number of buckets
    :param list columns:  DataFrame columns forming the key (default: all)
    :returns:  list of ``buckets`` pieces; row order is kept within a piece
    """
    if buckets == 1:
        return [obj]
    key = obj if columns is None else obj[columns]
    ids = bucket_ids(key, buckets)
    order = np.argsort(ids, kind="stable")
    bounds = np.searchsorted(ids[order], np.arange(buckets + 1))
    ordered = obj.iloc[order]
    return [
        ordered.iloc[bounds[ibucket] : bounds[ibucket + 1]]
        for ibucket in range(buckets)
    ]


def shuffle(partitions, buckets, columns=None, workers=None) -> list:
    """Exchange rows so that equal keys land in the same partition.

    :param list partitions:  non-empty list of input partitions (Series or
        DataFrames)
    :param int buckets:  number of output partitions
    :param list columns:  key columns (default: all)
    :param int workers:  maximum number of threads
    :returns:  list of ``buckets`` output partitions
    """
    pieces = run_partitions(
        lambda part: hash_split(part, buckets, columns), partitions, workers
    )
    outputs = [
        pd.concat([piece[ibucket] for piece in pieces], ignore_index=True)
        for ibucket in range(buckets)
    ]
    _LOGGER.debug(
        f"Shuffled {len(partitions)} partitions into {buckets} buckets."
    )
    return outputs
