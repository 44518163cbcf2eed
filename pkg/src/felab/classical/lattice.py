"""Nearest-neighbour edges of small rectangular lattices."""

from __future__ import annotations

import itertools

import numpy as np


def lattice_edges(dims, periodic: bool = True) -> list[tuple[int, int]]:
    """Undirected nearest-neighbour edges ``(v, w)`` with ``v < w``, row-major vertex order.

    Periodic side lengths 1 and 2 do not create self-loops or doubled edges.
    """
    dims = tuple(int(n) for n in dims)
    if not dims or min(dims) < 1:
        raise ValueError("lattice needs positive side lengths")
    index = np.arange(int(np.prod(dims))).reshape(dims)
    edges = set()
    for coord in itertools.product(*(range(n) for n in dims)):
        v = int(index[coord])
        for axis, n in enumerate(dims):
            c = list(coord)
            if coord[axis] + 1 < n:
                c[axis] += 1
            elif periodic and n > 1:
                c[axis] = 0
            else:
                continue
            w = int(index[tuple(c)])
            if v != w:
                edges.add((min(v, w), max(v, w)))
    return sorted(edges)
