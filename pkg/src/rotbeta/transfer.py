"""Ulam discretization of the transfer operator.

Cells are the images of the uniform ``N^m`` grid of ``[0, 1)^m`` under the
lattice-coordinate map, so cell lookup is a floor operation for every
parallelotope.  Samples are placed deterministically at offsets
``(2k + 1) / (2 s)`` inside each cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .dynamics import RotBetaMap

MAX_SAMPLES = 5 * 10**7
MAX_ENTRIES = 10**8


class NotConverged(RuntimeError):
    def __init__(self, msg, last, residual):
        super().__init__(msg)
        self.last = last
        self.residual = residual


@dataclass
class UlamOperator:
    map: RotBetaMap
    N: int
    s: int
    P: sp.csr_matrix

    @property
    def m(self) -> int:
        return self.map.m

    @property
    def n_cells(self) -> int:
        return self.N**self.m

    def cell_centers(self) -> np.ndarray:
        """Ambient coordinates of every cell center, in cell-index order."""
        idx = np.indices((self.N,) * self.m).reshape(self.m, -1).T
        return self.map.domain.to_ambient((idx + 0.5) / self.N)

    def cell_of(self, x) -> np.ndarray:
        c = self.map.domain.coords(x)
        k = np.clip(np.floor(c * self.N).astype(np.int64), 0, self.N - 1)
        return np.ravel_multi_index(tuple(k.T), (self.N,) * self.m)

    def coo_lines(self):
        P = self.P.tocoo()
        for i, j, v in zip(P.row, P.col, P.data):
            yield f"{i} {j} {v:.17g}"


def build_ulam(T: RotBetaMap, N: int, s: int = 4, chunk_cells: int = 1 << 14) -> UlamOperator:
    """Row-stochastic Ulam matrix: ``P[i, j]`` is the fraction of cell-i
    samples whose image lies in cell j."""
    if N < 2 or s < 1:
        raise ValueError("need N >= 2 and s >= 1")
    m = T.m
    n_cells = N**m
    if n_cells * s**m > MAX_SAMPLES:
        raise MemoryError(f"{n_cells * s ** m} samples exceed the cap {MAX_SAMPLES}")
    if n_cells * T.beta**m > MAX_ENTRIES:
        raise MemoryError(f"about {n_cells * T.beta ** m:.3g} entries exceed the cap {MAX_ENTRIES}")

    sub = (2 * np.arange(s) + 1) / (2 * s)
    offsets = np.stack(np.meshgrid(*([sub] * m), indexing="ij"), -1).reshape(-1, m)
    cells = np.indices((N,) * m).reshape(m, -1).T
    dom = T.domain
    rows, cols = [], []
    for a in range(0, n_cells, chunk_cells):
        blk = cells[a:a + chunk_cells]
        c = (blk[:, None, :] + offsets[None, :, :]) / N
        img = T.step(dom.to_ambient(c.reshape(-1, m)), check=False).image
        k = np.clip(np.floor(dom.coords(img) * N).astype(np.int64), 0, N - 1)
        cols.append(np.ravel_multi_index(tuple(k.T), (N,) * m))
        rows.append(np.repeat(np.arange(a, a + len(blk)), len(offsets)))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    data = np.full(len(rows), 1.0 / s**m)
    P = sp.coo_matrix((data, (rows, cols)), shape=(n_cells, n_cells)).tocsr()
    P.sum_duplicates()
    return UlamOperator(T, N, s, P)


@dataclass
class Components:
    count: int
    labels: np.ndarray  # 0 = transient, 1..count = recurrent class


def ergodic_components(op_or_matrix, support_threshold: float = 0.0) -> Components:
    """Recurrent classes (closed strongly connected components) of the
    digraph ``i -> j iff P[i, j] > support_threshold``."""
    P = op_or_matrix.P if isinstance(op_or_matrix, UlamOperator) else op_or_matrix
    A = sp.csr_matrix(P, copy=True)
    A.data = (A.data > support_threshold).astype(np.int8)
    A.eliminate_zeros()
    n, scc = connected_components(A, directed=True, connection="strong")
    coo = A.tocoo()
    leaves = np.ones(n, dtype=bool)
    leaves[np.unique(scc[coo.row][scc[coo.row] != scc[coo.col]])] = False
    # number the closed classes by their smallest cell index
    first = np.full(n, A.shape[0], dtype=np.int64)
    np.minimum.at(first, scc, np.arange(A.shape[0]))
    closed = np.flatnonzero(leaves)
    closed = closed[np.argsort(first[closed])]
    lut = np.zeros(n, dtype=np.int64)
    lut[closed] = np.arange(1, len(closed) + 1)
    return Components(len(closed), lut[scc])


@dataclass
class StationaryDensity:
    values: np.ndarray
    residual: float
    labels: np.ndarray
    component: int
    iterations: int

    @property
    def n_components(self) -> int:
        return int(self.labels.max())


def stationary(op: UlamOperator, tol: float = 1e-10, max_iter: int = 10**5, components=None):
    """One stationary vector per recurrent class.

    Power iteration of the lazy chain ``(I + P) / 2`` restricted to each class,
    started from the uniform vector on the class.  The lazy chain has the same
    stationary vectors and is aperiodic, so the iteration converges even on
    cyclic classes.
    """
    P = op.P if isinstance(op, UlamOperator) else sp.csr_matrix(op)
    comps = components or ergodic_components(P)
    PT = P.T.tocsr()
    out = []
    for label in range(1, comps.count + 1):
        idx = np.flatnonzero(comps.labels == label)
        Q = PT[idx][:, idx]
        pi = np.full(len(idx), 1.0 / len(idx))
        res = np.inf
        for it in range(1, max_iter + 1):
            nxt = Q @ pi
            res = float(np.abs(nxt - pi).sum())
            pi = 0.5 * (pi + nxt)
            pi /= pi.sum()
            if res <= tol:
                break
        full = np.zeros(P.shape[0])
        full[idx] = pi
        if res > tol:
            raise NotConverged(
                f"class {label}: residual {res:.3e} after {max_iter} iterations", full, res
            )
        out.append(StationaryDensity(full, res, comps.labels, label, it))
    return out


def lebesgue_equivalence_check(densities, delta: float | None = None) -> bool:
    """Numerical proxy: a single recurrent class with every cell ``>= delta``.

    ``delta`` defaults to ``1e-3 / n_cells``.
    """
    if isinstance(densities, StationaryDensity):
        densities = [densities]
    if len(densities) != 1 or densities[0].n_components != 1:
        return False
    v = densities[0].values
    if delta is None:
        delta = 1e-3 / len(v)
    return bool(np.all(v >= delta))


def density_rows(op: UlamOperator, densities):
    """Rows ``(cellIndex, coord_1..coord_m, densityValue, componentLabel)``.

    Recurrent classes have disjoint supports, so each cell carries the value
    of the class-wise density it belongs to.
    """
    centers = op.cell_centers()
    labels = densities[0].labels if densities else np.zeros(op.n_cells, dtype=int)
    total = sum(d.values for d in densities) if densities else np.zeros(op.n_cells)
    for i in range(op.n_cells):
        yield (i, *centers[i].tolist(), float(total[i]), int(labels[i]))
