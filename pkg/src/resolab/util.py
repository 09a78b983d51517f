"""Small shared helpers: quadrature nodes, deterministic serialization, parallel map."""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor

import numpy as np


@functools.lru_cache(maxsize=32)
def gauss_legendre(n: int):
    """Nodes and weights on [0, 1], cached."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def chunked(indices, size):
    for i in range(0, len(indices), size):
        yield indices[i : i + size]


def parallel_map(fn, items, threads=1):
    """Order-preserving map, optionally via a thread pool.

    Results do not depend on the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fmt_float(x) -> str:
    """17 significant digits; the fixed float format of every output file."""
    if isinstance(x, float) and (x != x):
        return "NaN"
    return format(float(x), ".17g")


def _json_fragments(obj, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _json_fragments([float(obj.real), float(obj.imag)], out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            _json_fragments(str(key), out)
            out.append(": ")
            _json_fragments(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(", ")
            _json_fragments(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def canonical_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits.

    Complex numbers are emitted as [re, im] pairs.
    """
    out = []
    _json_fragments(obj, out)
    return "".join(out) + "\n"


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
