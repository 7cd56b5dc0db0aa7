"""Lattices, fundamental domains and certified distance searches.

A fundamental domain is the half-open parallelotope

    X = { xi + B c : c in [0, 1)^m }

whose columns of ``B`` generate the lattice ``L``.  Every search here works in
lattice coordinates ``c`` and evaluates 1-Lipschitz objectives in ambient
coordinates, so grid values plus the ambient cell radius give certified
upper bounds (see :func:`lipschitz_maximize`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.spatial import cKDTree

SNAP = 1e-12

# initial cells per axis for the grid searches, keyed by dimension
DEFAULT_GRID = {1: 2000, 2: 200, 3: 40}


class LipschitzMax(NamedTuple):
    value: float
    point: np.ndarray
    error: float


def snap_coords(c):
    """Round lattice coordinates lying within ``SNAP`` of an integer onto it."""
    c = np.asarray(c, dtype=float)
    r = np.rint(c)
    return np.where(np.abs(c - r) <= SNAP, r, c)


@dataclass(frozen=True)
class LatticeDomain:
    """Half-open parallelotope spanned by the columns of ``basis`` at ``xi``."""

    basis: np.ndarray
    xi: np.ndarray
    inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if B.shape[0] != B.shape[1]:
            raise ValueError(f"basis must be square, got shape {B.shape}")
        xi = np.asarray(self.xi, dtype=float).reshape(-1)
        if xi.shape[0] != B.shape[0]:
            raise ValueError("translation xi and basis dimension disagree")
        scale = np.prod(np.linalg.norm(B, axis=0))
        if scale == 0 or abs(np.linalg.det(B)) <= 1e-12 * scale:
            raise ValueError("degenerate lattice basis")
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "inv", np.linalg.inv(B))

    @classmethod
    def from_vectors(cls, vectors, xi=None):
        """Build from a list of basis vectors eta_1..eta_m (rows of ``vectors``)."""
        V = np.atleast_2d(np.asarray(vectors, dtype=float))
        if xi is None:
            xi = np.zeros(V.shape[0])
        return cls(V.T.copy(), xi)

    @classmethod
    def unit_cube(cls, m=2):
        return cls(np.eye(m), np.zeros(m))

    @classmethod
    def from_dict(cls, spec):
        """Parse ``{"m": 2, "basis": [[...], [...]], "xi": [...]}``."""
        try:
            vectors = spec["basis"]
        except (KeyError, TypeError):
            raise ValueError("domain spec needs a 'basis' field") from None
        m = spec.get("m", len(vectors))
        xi = spec.get("xi", [0.0] * m)
        dom = cls.from_vectors(vectors, xi)
        if dom.m != m:
            raise ValueError(f"domain spec says m={m} but basis has dimension {dom.m}")
        return dom

    def to_dict(self):
        return {"m": self.m, "basis": self.basis.T.tolist(), "xi": self.xi.tolist()}

    @property
    def m(self) -> int:
        return self.basis.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        return self.basis.T

    @property
    def theta(self) -> float:
        """Angle between eta_1 and eta_2 (m = 2 only)."""
        if self.m != 2:
            raise ValueError("theta is defined only for m = 2")
        e1, e2 = self.basis[:, 0], self.basis[:, 1]
        cos = e1 @ e2 / (np.linalg.norm(e1) * np.linalg.norm(e2))
        return float(np.arccos(np.clip(cos, -1.0, 1.0)))

    @property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    def vertices(self) -> np.ndarray:
        corners = np.array(list(itertools.product((0.0, 1.0), repeat=self.m)))
        return self.to_ambient(corners)

    @property
    def diameter(self) -> float:
        v = self.vertices()
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d**2).sum(-1)).max())

    @property
    def max_norm(self) -> float:
        """max |x| over the closed parallelotope (attained at a vertex)."""
        return float(np.linalg.norm(self.vertices(), axis=1).max())

    def coords(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - self.xi) @ self.inv.T

    def to_ambient(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        return c @ self.basis.T + self.xi

    def contains(self, x):
        """Half-open membership, vectorized over the leading axes of ``x``."""
        c = snap_coords(self.coords(x))
        return np.all((c >= 0.0) & (c < 1.0), axis=-1)

    def reduce(self, x):
        """Return ``(x - d, d)`` with d in L and ``x - d`` in X."""
        x = np.asarray(x, dtype=float)
        k = np.floor(snap_coords(self.coords(x)))
        d = k @ self.basis.T
        return x - d, d

    def lattice_vectors(self, radius) -> np.ndarray:
        """All lattice vectors of norm at most ``radius``."""
        # |k_i| <= radius * |row_i(B^-1)| bounds every candidate
        bound = np.floor(radius * np.linalg.norm(self.inv, axis=1) + 1e-9).astype(int)
        axes = [np.arange(-b, b + 1) for b in bound]
        ks = np.array(list(itertools.product(*axes)), dtype=float)
        vs = ks @ self.basis.T
        return vs[np.linalg.norm(vs, axis=1) <= radius + 1e-12]

    def facet_distance(self, x) -> np.ndarray:
        """Signed distance to the closest facet hyperplane (negative outside)."""
        c = self.coords(x)
        row = np.linalg.norm(self.inv, axis=1)
        return np.min(np.minimum(c, 1.0 - c) / row, axis=-1)


@dataclass(frozen=True)
class Strip:
    """Closed strip ``{x : |<normal, x> - offset| <= half_width}``."""

    normal: np.ndarray
    offset: float
    half_width: float = 0.0

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float).reshape(-1)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("strip normal must be a unit vector")
        if self.half_width < 0:
            raise ValueError("strip half-width must be non-negative")
        object.__setattr__(self, "normal", n)

    @classmethod
    def from_angle(cls, angle, offset, half_width=0.0):
        return cls(np.array([np.cos(angle), np.sin(angle)]), float(offset), float(half_width))

    @property
    def width(self) -> float:
        return 2.0 * self.half_width

    def excess(self, x) -> np.ndarray:
        """Distance from ``x`` to the strip boundary, positive outside."""
        return np.abs(np.asarray(x, dtype=float) @ self.normal - self.offset) - self.half_width

    def contains(self, x):
        return self.excess(x) <= 0.0


def width(domain: LatticeDomain) -> float:
    """Minimal width of a strip containing the closed parallelotope.

    The minimum over directions is attained at a facet normal, where the
    support width is ``1 / |row_i(B^-1)|``.
    """
    return float(1.0 / np.linalg.norm(domain.inv, axis=1).max())


def dist_to_domain_complement(domain: LatticeDomain, x) -> float:
    x = np.asarray(x, dtype=float)
    if not domain.contains(x):
        raise ValueError("point not in domain")
    return float(domain.facet_distance(x))


def _cell_radius_factor(basis):
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=basis.shape[0])))
    return float(np.linalg.norm(signs @ basis.T, axis=1).max())


def lipschitz_maximize(
    f: Callable[[np.ndarray], np.ndarray],
    origin,
    basis,
    n0: int | None = None,
    tol: float = 1e-4,
    rtol: float = 0.0,
    factor: int = 4,
    max_rounds: int = 12,
    max_cells: int = 1 << 22,
    chunk: int = 1 << 18,
) -> LipschitzMax:
    """Certified maximum of a 1-Lipschitz function over a parallelotope.

    Branch and bound on the grid ``origin + basis @ [0, 1]^m``: every cell
    keeps the bound ``f(center) + radius``, cells whose bound falls below the
    best value seen are dropped, the survivors are split ``factor`` times per
    axis.  Stops once the certified gap is at most ``max(tol', 0)`` where
    ``tol' = min(tol, rtol * best)`` when ``rtol`` is set.  When refining
    would exceed ``max_cells`` (a plateau of maximizers) the search stops
    early and reports the larger gap it has certified so far.

    Returns
    -------
    LipschitzMax
        ``value`` is attained at ``point``; the true supremum lies in
        ``[value, value + error]``.  Ties go to the lexicographically
        smallest point.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    origin = np.asarray(origin, dtype=float).reshape(-1)
    m = basis.shape[0]
    n0 = n0 or DEFAULT_GRID.get(m, 16)
    kappa = _cell_radius_factor(basis)

    def evaluate(c):
        out = np.empty(len(c))
        for s in range(0, len(c), chunk):
            out[s:s + chunk] = f(c[s:s + chunk] @ basis.T + origin)
        return out

    ticks = (np.arange(n0) + 0.5) / n0
    centers = np.stack(np.meshgrid(*([ticks] * m), indexing="ij"), -1).reshape(-1, m)
    half = 0.5 / n0
    offsets = np.stack(
        np.meshgrid(*([(2 * np.arange(factor) + 1 - factor) / factor] * m), indexing="ij"), -1
    ).reshape(-1, m)

    best_val, best_pt = -np.inf, None
    for _ in range(max_rounds + 1):
        vals = evaluate(centers)
        order = np.lexsort(centers.T[::-1])
        i = order[np.argmax(vals[order])]
        if vals[i] > best_val:
            best_val, best_pt = float(vals[i]), centers[i].copy()
        rad = half * kappa
        upper = vals + rad
        keep = upper >= best_val
        gap = float(upper[keep].max() - best_val)
        target = tol if rtol <= 0 else min(tol, rtol * max(best_val, 0.0))
        if gap <= target or keep.sum() * factor**m > max_cells:
            break
        centers = (centers[keep][:, None, :] + half * offsets[None, :, :]).reshape(-1, m)
        half /= factor
    return LipschitzMax(best_val, best_pt @ basis.T + origin, max(gap, 0.0))


def _domain_search(domain, f, tol, rtol=0.0, n0=None):
    return lipschitz_maximize(f, domain.xi, domain.basis, n0=n0, tol=tol, rtol=rtol)


def periodic_tree(points, domain: LatticeDomain):
    """KD-tree over every lattice translate of ``points`` that can be nearest
    to a query inside the closed domain."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise ValueError("empty point set")
    P = domain.reduce(P)[0]
    # every x in X is within diam(X) of some translate of p, and |x - p| <= diam(X)
    shifts = domain.lattice_vectors(2.0 * domain.diameter)
    return cKDTree((P[None, :, :] + shifts[:, None, :]).reshape(-1, domain.m))


def covering_radius(points, domain: LatticeDomain, tol=None, n0=None) -> LipschitzMax:
    """Covering radius of the periodized set ``points + L``.

    The returned ``value`` is a lower bound attained at ``point``;
    ``value + error`` is a certified upper bound.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise ValueError("empty point set")
    tree = periodic_tree(P, domain)
    if tol is None:
        tol = 1e-4 * domain.diameter

    def f(x):
        return tree.query(x)[0]

    return _domain_search(domain, f, tol, n0=n0)


def largest_empty_ball(domain: LatticeDomain, obstacles=None, tol=None, rtol=0.0, n0=None):
    """Largest open ball inside X avoiding ``obstacles``.

    Maximizes ``min(dist(x, obstacles), dist(x, complement of X))``.
    Without obstacles this is the inball, returned exactly.
    """
    if tol is None:
        tol = 1e-4 * domain.diameter
    O = None if obstacles is None else np.asarray(obstacles, dtype=float).reshape(-1, domain.m)
    if O is None or len(O) == 0:
        center = domain.to_ambient(np.full(domain.m, 0.5))
        return LipschitzMax(width(domain) / 2.0, center, 0.0)
    tree = cKDTree(O)

    def f(x):
        return np.minimum(tree.query(x)[0], domain.facet_distance(x))

    return _domain_search(domain, f, tol, rtol=rtol, n0=n0)

