"""Lines and strips cutting the unit disk.

For ``k`` lines through the disk the cells always admit an inscribed ball of
radius ``1/(k+1)``, with equality only for ``k`` parallel lines spaced
``2/(k+1)`` apart.  The functions here measure that radius with a certified
Lipschitz search and check it on random configurations.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import Strip, lipschitz_maximize

SEARCH_TOL = 1e-5
CHECK_TOL = 2e-5
_BOX = (np.array([-1.0, -1.0]), 2.0 * np.eye(2))


@dataclass(frozen=True)
class LineConfig:
    normals: np.ndarray  # (k, 2) unit vectors
    offsets: np.ndarray  # (k,)

    def __post_init__(self):
        n = np.asarray(self.normals, dtype=float).reshape(-1, 2)
        c = np.asarray(self.offsets, dtype=float).reshape(-1)
        if len(n) != len(c):
            raise ValueError("need one offset per line")
        if np.abs(np.linalg.norm(n, axis=1) - 1.0).max(initial=0.0) > 1e-12:
            raise ValueError("line normals must be unit vectors")
        if np.any(np.abs(c) >= 1.0):
            raise ValueError("every line must cross the open unit disk")
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "offsets", c)

    @classmethod
    def from_angles(cls, angles, offsets):
        a = np.asarray(angles, dtype=float)
        return cls(np.stack([np.cos(a), np.sin(a)], -1), offsets)

    @classmethod
    def parallel(cls, k, angle=0.0):
        """``k`` parallel lines at spacing ``2/(k+1)``, the extremal arrangement."""
        offsets = -1.0 + 2.0 * np.arange(1, k + 1) / (k + 1)
        return cls.from_angles(np.full(k, angle), offsets)

    @property
    def k(self) -> int:
        return len(self.offsets)

    def rotated(self, angle):
        R = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        return LineConfig(self.normals @ R.T, self.offsets)

    def is_parallel(self, tol=1e-12):
        n = self.normals
        cross = n[:, 0] * n[0, 1] - n[:, 1] * n[0, 0]
        return bool(np.abs(cross).max() <= tol)

    def to_dict(self):
        return {"normals": self.normals.tolist(), "offsets": self.offsets.tolist()}


def max_inscribed_radius(config: LineConfig, tol=SEARCH_TOL):
    """Largest ball inside one cell cut from the unit disk by ``config``.

    Returns ``(radius, center, error)``; the true maximum lies in
    ``[radius, radius + error]`` and ``error <= tol``.
    """
    n, c = config.normals, config.offsets

    def f(x):
        d = np.abs(x @ n.T - c).min(axis=1) if len(c) else np.inf
        return np.minimum(1.0 - np.linalg.norm(x, axis=1), d)

    return lipschitz_maximize(f, *_BOX, n0=16, tol=tol)


@dataclass
class CutBoundReport:
    k: int
    trials: int
    seed: int
    bound: float
    min_radius: float
    parallel_radius: float
    min_nonparallel_excess: float | None
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self):
        return json.dumps(asdict(self) | {"passed": self.passed}, indent=2)


def random_line_config(rng, k):
    return LineConfig.from_angles(rng.uniform(0.0, np.pi, k), rng.uniform(-1.0, 1.0, k))


def verify_cut_bound(k, trials, seed=0, tol=CHECK_TOL) -> CutBoundReport:
    """Check the ``1/(k+1)`` bound on ``trials`` random arrangements of ``k`` lines.

    Normal angles are uniform on the circle and offsets uniform on (-1, 1).
    A trial fails when its radius drops below ``1/(k+1) - tol``, or, for a
    non-parallel arrangement with ``k >= 2``, when it does not exceed
    ``1/(k+1) + tol``.
    """
    if k not in (1, 2, 3, 4) or trials < 1:
        raise ValueError("need k in 1..4 and trials >= 1")
    rng = np.random.default_rng(seed)
    bound = 1.0 / (k + 1)
    par = max_inscribed_radius(LineConfig.parallel(k)).value
    failures = []
    if abs(par - bound) > tol:
        failures.append({"kind": "parallel", "lines": LineConfig.parallel(k).to_dict(),
                         "radius": par, "expected": bound})
    lo, excess = np.inf, np.inf
    for _ in range(trials):
        cfg = random_line_config(rng, k)
        r = max_inscribed_radius(cfg).value
        lo = min(lo, r)
        if r < bound - tol:
            failures.append({"kind": "below", "lines": cfg.to_dict(), "radius": r, "expected": bound})
        elif k >= 2 and not cfg.is_parallel():
            excess = min(excess, r - bound)
            if r <= bound + tol:
                failures.append({"kind": "not strict", "lines": cfg.to_dict(),
                                 "radius": r, "expected": bound})
    return CutBoundReport(k, trials, seed, bound, float(lo), float(par),
                          None if not np.isfinite(excess) else float(excess), failures)


def bang_cover_check(strips, seed=0, samples=4096, tol=1e-12):
    """Look for a point of the closed unit disk outside every strip.

    Returns ``(covered, witness)``.  Random samples are tried first, then a
    certified search of ``min(1 - |x|, min_i excess_i(x))``; a witness has
    every strip excess above ``tol``.  When the widths sum to less than 2 a
    witness must exist, and failing to find one raises ``AssertionError``.
    """
    strips = list(strips)
    N = np.array([s.normal for s in strips]).reshape(-1, 2)
    C = np.array([s.offset for s in strips])
    H = np.array([s.half_width for s in strips])

    def g(x):
        ex = (np.abs(x @ N.T - C) - H).min(axis=1) if len(strips) else np.full(len(x), np.inf)
        return np.minimum(1.0 - np.linalg.norm(x, axis=1), ex)

    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 1, samples))
    a = rng.uniform(0, 2 * np.pi, samples)
    pts = np.stack([r * np.cos(a), r * np.sin(a)], -1)
    vals = g(pts)
    if vals.max() > tol:
        return False, pts[np.argmax(vals)]
    best = lipschitz_maximize(g, *_BOX, n0=64, tol=1e-9, max_rounds=10)
    if best.value > tol:
        return False, best.point
    total = 2.0 * H.sum()
    if total < 2.0:
        raise AssertionError(
            f"no uncovered point found although total width {total:.6g} < 2: "
            + json.dumps([{"normal": s.normal.tolist(), "offset": s.offset,
                           "half_width": s.half_width} for s in strips])
        )
    return True, None


def random_strips(rng, max_total=1.9, max_k=6):
    """Random strips crossing the disk with total width at most ``max_total``."""
    k = int(rng.integers(1, max_k + 1))
    total = rng.uniform(0.1, max_total)
    w = rng.dirichlet(np.ones(k)) * total
    ang = rng.uniform(0, np.pi, k)
    off = rng.uniform(-0.95, 0.95, k)
    return [Strip.from_angle(a, c, h / 2) for a, c, h in zip(ang, off, w)]
