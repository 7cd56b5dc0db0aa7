"""Closed-form expansion thresholds for planar fundamental domains.

All functions take the angle ``theta`` between the two lattice generators, in
radians, and are symmetric under ``theta -> pi - theta``.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .dynamics import RotBetaMap, rotation

log = logging.getLogger(__name__)

SQRT5_M2 = np.sqrt(5.0) - 2.0


class BoundsInvariantError(ValueError):
    def __init__(self, msg, theta):
        super().__init__(f"{msg} at theta={theta!r}")
        self.theta = theta


def _check_theta(theta):
    t = np.asarray(theta, dtype=float)
    if np.any(~((t > 0) & (t < np.pi))):
        raise ValueError("theta must lie in (0, pi)")
    return t


def _fold(theta):
    t = _check_theta(theta)
    return np.minimum(t, np.pi - t)


def c_theta(theta):
    """Threshold of the complex-base family: sqrt((1 + sqrt(1 + 4 sin^4)) / (2 sin^2))."""
    s2 = np.sin(_check_theta(theta)) ** 2
    return np.sqrt((1.0 + np.sqrt(1.0 + 4.0 * s2**2)) / (2.0 * s2))


def b1_branches(theta):
    """The three candidate formulas of B1, evaluated at the folded angle.

    Returns an array of shape ``(3,) + theta.shape``.
    """
    t = _fold(theta)
    h = t / 2
    tan2 = np.tan(h) ** 2
    return np.array([
        np.full_like(t, 2.0),
        1.0 + 2.0 / (1.0 + np.sin(h)),
        1.5 + 1.0 / (16.0 * tan2) + tan2,
    ])


def b1_branch(theta, literal=False):
    """Branch index (1, 2, 3) used by :func:`b1`.

    The second branch is selected by ``sin(theta/2) < sqrt(5) - 2``; this is
    where the two-circle configuration meets the origin, and the only reading
    under which B1 is continuous.  ``literal=True`` selects it by
    ``sin(theta) < sqrt(5) - 2`` instead.
    """
    t = _fold(theta)
    second = np.sin(t) if literal else np.sin(t / 2)
    return np.where(np.tan(t / 2) > 0.5, 1, np.where(second < SQRT5_M2, 2, 3))


def b1(theta, literal=False):
    br = b1_branch(theta, literal)
    vals = b1_branches(theta)
    out = np.choose(br - 1, vals)
    return float(out) if np.ndim(out) == 0 else out


def b2_branches(theta):
    t = _fold(theta)
    return np.array([
        1.0 + 1.0 / (np.sin(t) * np.cos(t / 2)),
        1.0 + 2.0 / (1.0 + np.sin(t / 2)),
    ])


def b2_branch(theta):
    return np.where(_fold(theta) > np.pi / 3, 1, 2)


def b2(theta):
    out = np.choose(b2_branch(theta) - 1, b2_branches(theta))
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class BoundsTable:
    theta: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C: np.ndarray
    branch_b1: np.ndarray
    branch_b2: np.ndarray
    literal_mismatch: np.ndarray = field(repr=False, default=None)

    def rows(self):
        for r in zip(self.theta, self.B1, self.B2, self.C, self.branch_b1, self.branch_b2):
            yield (float(r[0]), float(r[1]), float(r[2]), float(r[3]), int(r[4]), int(r[5]))

    def to_csv(self, fh=None):
        buf = fh or io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "B1", "B2", "C", "branchB1", "branchB2"])
        for r in self.rows():
            w.writerow([repr(r[0]), repr(r[1]), repr(r[2]), repr(r[3]), r[4], r[5]])
        return buf.getvalue() if fh is None else None


def bounds_table(theta_grid, check=True, ineq_tol=1e-12) -> BoundsTable:
    """Evaluate B1, B2, C on ``theta_grid`` and enforce the table invariants.

    Raises :class:`BoundsInvariantError` naming the first offending angle when
    ``B1 <= B2 < 3``, ``min > 1`` or the mirror symmetry fails.
    """
    t = _check_theta(np.asarray(theta_grid, dtype=float).reshape(-1))
    tab = BoundsTable(
        t, b1(t), b2(t), c_theta(t), b1_branch(t), b2_branch(t),
        literal_mismatch=b1_branch(t) != b1_branch(t, literal=True),
    )
    if tab.literal_mismatch.any():
        log.info(
            "B1 branch differs from the sin(theta) reading at %d of %d angles",
            int(tab.literal_mismatch.sum()), len(t),
        )
    if check:
        bad = [
            (tab.B1 > tab.B2 + ineq_tol, "B1 > B2"),
            (tab.B2 >= 3.0, "B2 >= 3"),
            (np.minimum(tab.B1, tab.B2) <= 1.0, "bound <= 1"),
            (np.abs(b1(np.pi - t) - tab.B1) > 1e-12, "B1 not symmetric"),
            (np.abs(b2(np.pi - t) - tab.B2) > 1e-12, "B2 not symmetric"),
        ]
        for mask, what in bad:
            if mask.any():
                raise BoundsInvariantError(what, float(t[np.argmax(mask)]))
    return tab


def default_grid(n=1000, eps=0.01):
    return np.linspace(eps, np.pi - eps, n)


# ---------------------------------------------------------------- verdicts

APPLIES = "applies"
FAILS = "hypothesisFails"
MISSING = "evidenceMissing"


@dataclass
class TheoremVerdict:
    name: str
    status: str
    bound: float | None
    margin: float | None
    note: str = ""


def _complex_base_theta(T: RotBetaMap):
    """theta if T is the complex-base map z -> zeta z on Z + (-conj zeta) Z."""
    if T.m != 2:
        return None
    B = T.domain.basis
    if not np.allclose(B[:, 0], [1.0, 0.0], atol=1e-12):
        return None
    zeta_bar = -(B[0, 1] + 1j * B[1, 1])
    zeta = np.conj(zeta_bar)
    if abs(abs(zeta) - T.beta) > 1e-9 or abs(zeta.imag) < 1e-12:
        return None
    theta = float(np.angle(zeta))
    if not np.allclose(T.M, rotation(theta), atol=1e-12):
        return None
    return theta if theta > 0 else None


def applicable_theorems(T: RotBetaMap, s_evidence=None, slab_evidence=None):
    """Which of the ACIM results cover ``T``.

    ``s_evidence`` is a :class:`~rotbeta.dynamics.PropertySReport` or a bool;
    ``slab_evidence`` a bool from :func:`~rotbeta.dynamics.check_slab_condition`.
    ``None`` means unchecked.  Margins are ``beta - bound``.
    """
    beta, m = T.beta, T.m
    if s_evidence is not None and not isinstance(s_evidence, bool):
        s_ok = s_evidence.satisfied_at is not None
    else:
        s_ok = s_evidence

    def verdict(name, bound, ok, extra, note=""):
        margin = beta - bound
        if not ok:
            status = FAILS
        elif any(e is False for e in extra):
            status = FAILS
        elif any(e is None for e in extra):
            status = MISSING
        else:
            status = APPLIES
        return TheoremVerdict(name, status, float(bound), float(margin), note)

    out = [
        verdict("m+1", m + 1, beta >= m + 1, [s_ok], "unique ACIM equivalent to Lebesgue"),
        verdict("slab", 2.0, beta > 2, [s_ok, slab_evidence], "unique ACIM equivalent to Lebesgue"),
    ]
    theta = _complex_base_theta(T)
    if theta is not None:
        c = float(c_theta(theta))
        out.append(verdict(
            "complex-base", max(2.0, c), beta > max(2.0, c), [True],
            "hypothesis beta > max(2, C); the argument itself only uses beta > max(sqrt 2, C)",
        ))
    if m == 2:
        th = T.domain.theta
        out.append(verdict("B1", b1(th), beta > b1(th), [s_ok], "unique ACIM"))
        out.append(verdict("B2", b2(th), beta > b2(th), [s_ok], "ACIM equivalent to Lebesgue"))
    return out


def verdict_dict(verdicts):
    return {v.name: {"status": v.status, "bound": v.bound, "margin": v.margin, "note": v.note}
            for v in verdicts}
