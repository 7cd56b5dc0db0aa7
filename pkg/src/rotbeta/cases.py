"""Worked examples: the symmetric square map and the complex-base family."""

from __future__ import annotations

import numpy as np

from .bounds import applicable_theorems, c_theta, verdict_dict
from .dynamics import RotBetaMap, check_property_s, rotation
from .geometry import LatticeDomain
from .transfer import build_ulam, ergodic_components, lebesgue_equivalence_check, stationary


def symmetric_map(beta, m=1) -> RotBetaMap:
    """``x -> beta x - floor(beta x + 1/2)`` on ``[-1/2, 1/2)^m``, coordinatewise."""
    return RotBetaMap(beta, np.eye(m), LatticeDomain(np.eye(m), np.full(m, -0.5)))


def square_sizes(beta):
    """Side lengths ``(big, small) = ((b-1)/(b(b+1)), (b-1)/(2(b+1)))``."""
    return (beta - 1) / (beta * (beta + 1)), (beta - 1) / (2 * (beta + 1))


def two_cycle_intervals(beta):
    """Intervals ``A`` (length ``big``) and ``B`` (length ``small``) swapped
    by the 1D symmetric map when ``beta <= sqrt 2``.

    ``B`` holds the two end intervals of ``[-1/2, 1/2]`` and ``A`` their
    preimage intervals next to them.
    """
    _, small = square_sizes(beta)
    A = [((0.5 - small) / beta, (0.5 + small) / beta)]
    A.insert(0, (-A[0][1], -A[0][0]))
    B = [(-0.5, -0.5 + small), (0.5 - small, 0.5)]
    return A, B


def y_pieces(beta):
    """``(Y1, Y2)`` as lists of rectangles ``((x0, x1), (y0, y1))``.

    Y1 is the eight squares ``A x A`` and ``B x B``; Y2 the eight rectangles
    ``A x B`` and ``B x A``.
    """
    A, B = two_cycle_intervals(beta)
    Y1 = [(I, J) for I in A for J in A] + [(I, J) for I in B for J in B]
    Y2 = [(I, J) for I in A for J in B] + [(I, J) for I in B for J in A]
    return Y1, Y2


def _axis_images(beta, lo, hi):
    """Affine pieces of the 1D symmetric map on ``[lo, hi]``: image intervals."""
    ks = np.arange(np.ceil(beta * lo + 0.5), np.floor(beta * hi + 0.5) + 1)
    cuts = np.concatenate([[lo], (ks - 0.5) / beta, [hi]])
    cuts = np.unique(np.clip(cuts, lo, hi))
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 1e-15:
            continue
        d = np.floor(beta * (a + b) / 2 + 0.5)
        out.append(((a, b), (beta * a - d, beta * b - d)))
    return out


def _inside(box, piece, tol=1e-12):
    return all(p[0] - tol <= b[0] and b[1] <= p[1] + tol for b, p in zip(box, piece))


def check_invariance(beta, pieces):
    """Exact affine images of every rectangle piece; returns the offending
    ``(piece, sub-rectangle, image)`` triples (empty when invariant)."""
    bad = []
    for piece in pieces:
        xs = _axis_images(beta, *piece[0])
        ys = _axis_images(beta, *piece[1])
        for (sx, ix) in xs:
            for (sy, iy) in ys:
                img = (ix, iy)
                if not any(_inside(img, q) for q in pieces):
                    bad.append({"piece": piece, "sub": (sx, sy), "image": img})
    return bad


def _in_rects(points, rects):
    hit = np.zeros(len(points), dtype=bool)
    for (x0, x1), (y0, y1) in rects:
        hit |= (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)
    return hit


def case_square(beta, N=96, s=4, tol=1e-10):
    """Two-component example on the square; returns a JSON-ready report."""
    if not beta > 1:
        raise ValueError("beta must exceed 1")
    big, small = square_sizes(beta)
    report = {"beta": beta, "N": N, "s": s, "squareSizes": {"big": big, "small": small}}
    if beta <= np.sqrt(2):
        Y1, Y2 = y_pieces(beta)
        report["invariance"] = {
            "Y1": check_invariance(beta, Y1),
            "Y2": check_invariance(beta, Y2),
        }
    else:
        Y1 = Y2 = None
        report["invariance"] = None

    T = symmetric_map(beta, 2)
    op = build_ulam(T, N, s)
    comps = ergodic_components(op)
    dens = stationary(op, tol=tol, components=comps)
    report["components"] = comps.count

    centers = op.cell_centers()
    classes = []
    U = build_ulam(symmetric_map(beta, 1), N, s)
    ref = stationary(U, tol=tol)
    ref1d = sum(d.values for d in ref) / len(ref)
    for d in dens:
        entry = {"label": d.component, "cells": int((d.labels == d.component).sum())}
        if Y1 is not None:
            entry["massInY1"] = float(d.values[_in_rects(centers, Y1)].sum())
            entry["massInY2"] = float(d.values[_in_rects(centers, Y2)].sum())
        proj = d.values.reshape(N, N).sum(axis=1)
        entry["projectionL1"] = float(np.abs(proj - ref1d).sum())
        classes.append(entry)
    report["classes"] = classes
    report["lebesgueEquivalent"] = lebesgue_equivalence_check(dens) if beta >= 2 else None
    # invariant Y1/Y2 force two classes; a unique equivalent ACIM forces one
    if beta <= np.sqrt(2):
        report["expected"], report["agrees"] = "at least 2 classes", comps.count >= 2
    elif beta >= 2:
        report["expected"] = "1 class, positive density"
        report["agrees"] = comps.count == 1 and bool(report["lebesgueEquivalent"])
    else:
        report["expected"], report["agrees"] = None, None
    return report


def complex_base_map(beta, theta) -> RotBetaMap:
    """``z -> zeta z - d`` with ``zeta = beta e^{i theta}`` on the domain
    spanned by ``1`` and ``-conj(zeta)``."""
    if not 0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi)")
    eta2 = [-beta * np.cos(theta), beta * np.sin(theta)]
    return RotBetaMap(beta, rotation(theta), LatticeDomain.from_vectors([[1.0, 0.0], eta2]))


def case_complex_base(beta, theta, N=64, s=4, tol=1e-10):
    T = complex_base_map(beta, theta)
    z = T.domain.to_ambient([0.5, 0.5])
    s_ev = check_property_s(T, z, 2)
    verdicts = applicable_theorems(T, s_ev)
    C = float(c_theta(theta))
    predicted = beta > max(2.0, C)

    op = build_ulam(T, N, s)
    comps = ergodic_components(op)
    dens = stationary(op, tol=tol, components=comps)
    equiv = lebesgue_equivalence_check(dens)
    return {
        "beta": beta,
        "theta": theta,
        "C": C,
        "prediction": "unique ACIM equivalent to Lebesgue" if predicted else "no prediction",
        "components": comps.count,
        "lebesgueEquivalent": equiv,
        "agrees": (equiv and comps.count == 1) if predicted else None,
        "propertyS": {"satisfiedAt": s_ev.satisfied_at, "margins": s_ev.margins},
        "verdicts": verdict_dict(verdicts),
    }
