"""Brute-force semantic oracle over every small Kripke model at once.

All models produced by :func:`kripke.enumerate_models` are laid side by
side; a truth set is then one boolean vector over the concatenated nodes,
and implication is a sparse matrix-vector product with the up-set matrix.
"""
from __future__ import annotations

import threading
from functools import lru_cache
from typing import Iterable

import numpy as np
from scipy import sparse

from .formula import Bottom, Conj, Disj, Formula, Top, Variable, variables, _memo_fold
from .kripke import KripkeModel, _shape_to_model, _shapes


class ModelBank:
    def __init__(self, vars: Iterable[str], max_nodes: int):
        self.var_list = sorted(vars)
        self.max_nodes = max_nodes
        self.shapes = list(_shapes(len(self.var_list), max_nodes))
        offsets = [0]
        rows, cols = [], []
        vals = []
        for shape in self.shapes:
            base = offsets[-1]
            n = shape.size
            up = [{i} for i in range(n)]
            for a, b in shape.relation:
                up[a].add(b)
            for i in range(n):
                for j in up[i]:
                    rows.append(base + i)
                    cols.append(base + j)
            vals.extend(shape.valuation)
            offsets.append(base + n)
        self.offsets = np.array(offsets)
        self.size = offsets[-1]
        self.up = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(self.size, self.size))
        vals = np.array(vals, dtype=np.int64)
        self._atoms = {v: (vals >> k & 1).astype(bool) for k, v in enumerate(self.var_list)}
        self._cache: dict[Formula, np.ndarray] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self.shapes)

    def truth(self, f: Formula) -> np.ndarray:
        extra = variables(f) - set(self.var_list)
        if extra:
            raise ValueError(f"variables {sorted(extra)} outside the bank signature")
        ones = np.ones(self.size, dtype=bool)

        def leaf(g):
            if isinstance(g, Variable):
                return self._atoms[g.name]
            if isinstance(g, Bottom):
                return ~ones
            if isinstance(g, Top):
                return ones
            raise TypeError(g)

        def node(g, a, b):
            if isinstance(g, Conj):
                return a & b
            if isinstance(g, Disj):
                return a | b
            bad = (a & ~b).astype(np.int32)
            return (self.up @ bad) == 0

        with self._lock:
            if len(self._cache) > 200_000:
                self._cache.clear()
            return _memo_fold(f, leaf, node, self._cache)

    def first_refutation(self, phi: Formula, psi: Formula):
        """``(model, node)`` for the first node forcing ``phi`` but not
        ``psi`` in enumeration order, or ``None``."""
        hits = np.flatnonzero(self.truth(phi) & ~self.truth(psi))
        if hits.size == 0:
            return None
        g = int(hits[0])
        k = int(np.searchsorted(self.offsets, g, side="right")) - 1
        model = _shape_to_model(self.shapes[k], self.var_list)
        return model, g - int(self.offsets[k])

    def model(self, k: int) -> KripkeModel:
        return _shape_to_model(self.shapes[k], self.var_list)


@lru_cache(maxsize=32)
def _bank(var_key: tuple, max_nodes: int) -> ModelBank:
    return ModelBank(var_key, max_nodes)


def model_bank(vars: Iterable[str], max_nodes: int) -> ModelBank:
    return _bank(tuple(sorted(vars)), max_nodes)
