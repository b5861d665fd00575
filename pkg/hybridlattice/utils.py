import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields, is_dataclass

import numpy as np

THREADS_ENV = 'HYBRIDLATTICE_THREADS'


def obj_to_dict(obj, exclude=()):
    """Dumps an object into the dictionary excluding received fields.

    Dataclass instances are dumped field by field, nested dataclasses
    recursively; other objects through their __dict__ attribute.

    :param obj: An object to dump
    :type obj: object
    :param exclude: Exclusion fields where each field is a string
    :type exclude: iterable
    :return: Dictionary with excluded fields
    :rtype: dict
    """
    if is_dataclass(obj):
        items = ((f.name, getattr(obj, f.name)) for f in fields(obj))
    else:
        items = obj.__dict__.items()
    return {
        k: _dump_value(v) for k, v in items if k not in exclude
    }


def _dump_value(value):
    if is_dataclass(value):
        return obj_to_dict(value)
    if isinstance(value, (list, tuple)):
        return [_dump_value(v) for v in value]
    return value


def is_finite(*values):
    """Checks that every value is a finite real number.

    :return: True if all values are finite numbers otherwise False
    :rtype: bool
    """
    try:
        return bool(np.all(np.isfinite(np.asarray(values, dtype=float))))
    except (TypeError, ValueError):
        return False


def format_number(value):
    """Formats a float for CSV output, identically on every run.

    :param value: Number or None
    :type value: float or None
    :return: String representation, empty for None
    :rtype: str
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    return repr(float(value))


def sweep_workers():
    """Reads the worker cap for sweeps from the environment.

    :return: Number of worker threads (at least 1)
    :rtype: int
    """
    raw = os.environ.get(THREADS_ENV, '')
    try:
        workers = int(raw)
    except ValueError:
        workers = os.cpu_count() or 1
    return max(1, workers)


def parallel_map(func, items):
    """Maps func over items on a thread pool, preserving order.

    :param func: Callable of one argument
    :type func: function
    :param items: Arguments
    :type items: iterable
    :return: Results in input order
    :rtype: list
    """
    items = list(items)
    workers = min(sweep_workers(), len(items) or 1)
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


class _NumpyJSONEncoder(json.JSONEncoder):
    """Custom JSON encoder for objects with numpy and complex fields."""

    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, complex):
            return [o.real, o.imag]
        return super(_NumpyJSONEncoder, self).default(o)


def dumps(data, **kwargs):
    """Dumps data to JSON with stable key order.

    :param data: JSON-serialisable data (numpy values allowed)
    :param kwargs: Keyword arguments for json.dumps
    :return: JSON string
    :rtype: str
    """
    kwargs.setdefault('indent', 2)
    kwargs.setdefault('sort_keys', True)
    kwargs['cls'] = _NumpyJSONEncoder
    return json.dumps(data, **kwargs)
