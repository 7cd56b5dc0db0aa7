"""Rotational beta transformations ``T(z) = beta M z - d(z)`` and their inverse branches."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .geometry import (
    LatticeDomain,
    covering_radius,
    largest_empty_ball,
    snap_coords,
    width,
)

NODE_BUDGET = 10**7
DEDUP = 1e-12


class NodeBudgetExceeded(RuntimeError):
    """Raised by :func:`preimage_tree` with the levels built so far attached."""

    def __init__(self, msg, partial):
        super().__init__(msg)
        self.partial = partial


def rotation(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def reflection(axis_angle):
    """Reflection across the line through the origin at ``axis_angle``."""
    c, s = np.cos(2 * axis_angle), np.sin(2 * axis_angle)
    return np.array([[c, s], [s, -c]])


def check_isometry(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError("isometry must be a square matrix")
    if np.abs(M.T @ M - np.eye(len(M))).max() > 1e-12:
        raise ValueError("matrix is not orthogonal")
    return M


class Step(NamedTuple):
    image: np.ndarray
    digit: np.ndarray
    fragile: bool | np.ndarray


@dataclass(frozen=True)
class RotBetaMap:
    """The map ``z -> beta M z - d`` on the fundamental domain ``domain``."""

    beta: float
    M: np.ndarray
    domain: LatticeDomain
    _Minv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.beta > 1:
            raise ValueError("beta must exceed 1")
        M = check_isometry(self.M)
        if M.shape[0] != self.domain.m:
            raise ValueError("isometry and domain dimensions disagree")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "_Minv", M.T.copy())

    @property
    def m(self) -> int:
        return self.domain.m

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if not np.all(self.domain.contains(z)):
            raise ValueError("point not in domain")
        return z

    def step(self, z, check=True) -> Step:
        """One application of T; vectorized over leading axes of ``z``.

        ``fragile`` flags images with a lattice coordinate within 1e-12 of 1,
        where floating point may pick the neighbouring digit.
        """
        if check:
            z = self._check(z)
        dom = self.domain
        y = self.beta * (np.asarray(z, dtype=float) @ self.M.T)
        raw = dom.coords(y)
        c = snap_coords(raw)
        k = np.floor(c)
        digit = k @ dom.basis.T
        image = y - digit
        fragile = np.any(c != raw, axis=-1)
        return Step(image, digit, fragile)

    def __call__(self, z):
        return self.step(z).image

    def digit_coords(self, digit):
        """Integer lattice coordinates of a digit vector."""
        return np.rint(np.asarray(digit) @ self.domain.inv.T).astype(int)

    def orbit(self, z, n):
        """Points z, T z, ..., T^n z with the digits d_1..d_n and fragility flags."""
        z = self._check(z)
        pts = [z]
        digits, fragile = [], []
        for _ in range(n):
            s = self.step(pts[-1], check=False)
            pts.append(s.image)
            digits.append(s.digit)
            fragile.append(bool(s.fragile))
        return np.array(pts), np.array(digits).reshape(n, self.m), np.array(fragile, dtype=bool)

    def expand(self, z, n) -> DigitExpansion:
        if n < 1:
            raise ValueError("n must be at least 1")
        pts, digits, fragile = self.orbit(z, n)
        return DigitExpansion(self, np.asarray(z, dtype=float), digits, pts, bool(fragile.any()))

    def _digit_candidates(self):
        # z + d in beta M closure(X) for some z in closure(X): lattice coords of
        # the Minkowski difference beta M X - X, widened by one cell
        dom = self.domain
        V = dom.vertices()
        img = self.beta * (V @ self.M.T)
        diff = (img[:, None, :] - V[None, :, :]).reshape(-1, self.m) + dom.xi
        c = dom.coords(diff)
        lo = np.floor(c.min(0)) - 1
        hi = np.ceil(c.max(0)) + 1
        axes = [np.arange(a, b + 1) for a, b in zip(lo.astype(int), hi.astype(int))]
        ks = np.array(list(itertools.product(*axes)), dtype=float)
        return ks @ dom.basis.T

    def preimages(self, z, check=True):
        """All x in X with T x = z, for a single point or an (n, m) array.

        For an array input returns ``(points, parent_index)``.
        """
        z = np.asarray(z, dtype=float)
        single = z.ndim == 1
        Z = z.reshape(-1, self.m)
        if check:
            self._check(Z)
        D = self._digit_candidates()
        cand = (Z[:, None, :] + D[None, :, :]) @ self._Minv.T / self.beta
        parent = np.repeat(np.arange(len(Z)), len(D))
        cand = cand.reshape(-1, self.m)
        inside = self.domain.contains(cand)
        pts, parent = cand[inside], parent[inside]
        if single:
            return pts
        return pts, parent

    def to_dict(self):
        return {
            "beta": self.beta,
            "isometry": {"kind": "matrix", "rows": self.M.tolist()},
            "domain": self.domain.to_dict(),
        }


@dataclass
class DigitExpansion:
    map: RotBetaMap
    z: np.ndarray
    digits: np.ndarray
    orbit: np.ndarray
    fragile: bool = False

    @property
    def n(self) -> int:
        return len(self.digits)

    @property
    def int_digits(self) -> np.ndarray:
        return self.map.digit_coords(self.digits)

    def partial_sums(self):
        """Rows k = 1..n of sum_{i<=k} M^{-i} d_i / beta^i."""
        T = self.map
        out = np.zeros((self.n, T.m))
        acc = np.zeros(T.m)
        Mi = np.eye(T.m)
        for i, d in enumerate(self.digits, start=1):
            Mi = T._Minv @ Mi
            acc = acc + Mi @ d / T.beta**i
            out[i - 1] = acc
        return out

    def reconstruct(self, k=None):
        k = self.n if k is None else k
        if k == 0:
            return np.zeros(self.map.m)
        return self.partial_sums()[k - 1]

    def error_bound(self, k=None):
        k = self.n if k is None else k
        return self.map.domain.max_norm / self.map.beta**k


def _dedup(points, parents):
    key = np.round(points / DEDUP).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx.sort()
    return points[idx], parents[idx]


def preimage_tree(T: RotBetaMap, z, depth, budget=NODE_BUDGET):
    """Levels ``[{z}, T^-1 z, ..., T^-depth z]``.

    Returns ``(levels, parents)`` where ``parents[i][j]`` is the index in level
    ``i - 1`` of the image of ``levels[i][j]`` (``parents[0]`` is empty).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    z = T._check(np.asarray(z, dtype=float).reshape(T.m))
    if T.beta ** (T.m * depth) > budget:
        warnings.warn(
            f"beta^(m*depth) = {T.beta ** (T.m * depth):.3g} exceeds the node budget {budget}",
            RuntimeWarning,
            stacklevel=2,
        )
    levels = [z[None, :]]
    parents = [np.zeros(0, dtype=int)]
    total = 1
    for i in range(depth):
        pts, par = T.preimages(levels[-1], check=False)
        pts, par = _dedup(pts, par)
        total += len(pts)
        if total > budget:
            raise NodeBudgetExceeded(
                f"preimage tree exceeded {budget} nodes at level {i + 1}", (levels, parents)
            )
        levels.append(pts)
        parents.append(par)
    return levels, parents


@dataclass
class HoleReport:
    level: int
    center: np.ndarray
    radius: float
    error: float
    cumulative: bool
    count: int
    ratio: float | None = None


def hole_radii(T: RotBetaMap, z, depth, cumulative=True, rtol=1e-3, tree=None):
    """Largest hole of each level n = 0..depth.

    Cumulative mode avoids every preimage of levels 1..n (so level 0 is the
    empty-obstacle inball); single-level mode avoids ``T^-n z`` only.
    ``ratio`` is ``r_n / r_{n-1}``.
    """
    levels, _ = tree if tree is not None else preimage_tree(T, z, depth)
    reports = []
    acc = np.zeros((0, T.m))
    for n in range(depth + 1):
        if cumulative:
            if n > 0:
                acc = np.vstack([acc, levels[n]])
            obstacles = acc
        else:
            obstacles = levels[n]
        ball = largest_empty_ball(T.domain, obstacles, rtol=rtol)
        ratio = None
        if reports and reports[-1].radius > 0:
            ratio = ball.value / reports[-1].radius
        reports.append(
            HoleReport(n, ball.point, ball.value, ball.error, cumulative, len(levels[n]), ratio)
        )
    return reports


@dataclass
class PropertySReport:
    satisfied_at: int | None
    margins: list
    errors: list
    z: np.ndarray


def check_property_s(T: RotBetaMap, z, n_max, tol=None):
    """Evidence for ``2 r(T^-n z + L) <= beta w(X)`` at the first possible n.

    ``margins[n] = beta w(X) - 2 r_n``; level n counts as satisfied once the
    margin exceeds the certified error of ``2 r_n``.
    """
    z = T._check(np.asarray(z, dtype=float).reshape(T.m))
    bw = T.beta * width(T.domain)
    levels = [z[None, :]]
    if n_max > 0:
        levels = preimage_tree(T, z, n_max)[0]
    margins, errors = [], []
    hit = None
    for n, P in enumerate(levels):
        r = covering_radius(P, T.domain, tol=tol)
        g = bw - 2 * r.value
        margins.append(float(g))
        errors.append(float(2 * r.error))
        if g >= 2 * r.error:
            hit = n
            break
    return PropertySReport(hit, margins, errors, z)


def check_slab_condition(T: RotBetaMap, eta) -> bool:
    """Is ``beta M X`` inside the chain of translates ``X + j eta``?

    ``eta`` must be an integer multiple of one basis vector.  The image
    parallelotope is convex, so a vertex test suffices.
    """
    dom = T.domain
    k = dom.inv @ np.asarray(eta, dtype=float).reshape(T.m)
    ki = np.rint(k)
    if np.abs(k - ki).max() > 1e-9 or not ki.any():
        raise ValueError("eta is not a nonzero lattice vector")
    nz = np.flatnonzero(ki)
    if len(nz) != 1:
        raise ValueError("eta must be an integer multiple of a single basis vector")
    j = nz[0]
    step = abs(ki[j])
    c = dom.coords(T.beta * (dom.vertices() @ T.M.T))
    others = np.delete(c, j, axis=1)
    if others.size and (others.min() < -1e-9 or others.max() > 1 + 1e-9):
        return False
    if step == 1:
        return True
    # translates by multiples of step*eta_j leave gaps; the convex image must
    # fit into a single one of them
    lo, hi = c[:, j].min(), c[:, j].max()
    base = np.floor((lo + 1e-9) / step) * step
    return bool(hi <= base + 1 + 1e-9)
