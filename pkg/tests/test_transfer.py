import networkx as nx
import numpy as np
import pytest
import scipy.sparse as sp

from rotbeta.cases import symmetric_map
from rotbeta.dynamics import RotBetaMap, rotation
from rotbeta.geometry import LatticeDomain
from rotbeta.transfer import (
    NotConverged,
    build_ulam,
    density_rows,
    ergodic_components,
    lebesgue_equivalence_check,
    stationary,
)


def square_map(beta, angle=0.0):
    return RotBetaMap(beta, rotation(angle), LatticeDomain.unit_cube(2))


def exact_overlap_1d(beta, N):
    """Fraction of cell i sent into cell j by x -> beta x mod 1, integer beta."""
    Q = np.zeros((N, N))
    for i in range(N):
        a, b = i / N, (i + 1) / N
        cuts = np.unique(np.concatenate([[a, b], np.arange(np.ceil(beta * a), np.floor(beta * b) + 1) / beta]))
        cuts = cuts[(cuts >= a) & (cuts <= b)]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            d = np.floor(beta * (lo + hi) / 2)
            ilo, ihi = beta * lo - d, beta * hi - d
            for j in range(N):
                ov = max(0.0, min(ihi, (j + 1) / N) - max(ilo, j / N))
                Q[i, j] += ov / beta * N
    return Q


class TestBuild:
    def test_two_cells(self, doubling):
        P = build_ulam(doubling, 2, s=64).P.toarray()
        assert np.array_equal(P, np.full((2, 2), 0.5))

    def test_four_cells(self, doubling):
        P = build_ulam(doubling, 4, s=8).P.toarray()
        for row in P:
            assert sorted(row[row > 0].tolist()) == [0.5, 0.5]

    @pytest.mark.parametrize("N, s", [(7, 1), (16, 3), (33, 5)])
    def test_row_stochastic(self, slab_map, N, s):
        P = build_ulam(slab_map, N, s).P
        assert P.shape == (N * N, N * N)
        assert P.data.min() >= 0
        assert np.abs(np.asarray(P.sum(1)).ravel() - 1).max() <= 1e-12

    @pytest.mark.parametrize("beta, N, s", [(3, 10, 4), (2, 13, 6), (4, 7, 5)])
    def test_matches_exact_overlap(self, beta, N, s):
        T = RotBetaMap(float(beta), np.eye(2), LatticeDomain.unit_cube(2))
        P = build_ulam(T, N, s).P.toarray()
        Q1 = exact_overlap_1d(beta, N)
        assert np.allclose(Q1.sum(1), 1)
        Q = np.kron(Q1, Q1)  # cell index is row-major in (c1, c2)
        assert np.abs(P - Q).max() <= 1.0 / s

    def test_guard(self):
        with pytest.raises(MemoryError):
            build_ulam(square_map(3.0), 4000, 2)

    def test_deterministic(self, slab_map):
        a = build_ulam(slab_map, 12, 3).P
        b = build_ulam(slab_map, 12, 3).P
        assert (a != b).nnz == 0


class TestStationary:
    def test_doubling_uniform(self, doubling):
        d = stationary(build_ulam(doubling, 8))
        assert len(d) == 1
        assert np.allclose(d[0].values, 1 / 8, atol=1e-12)

    def test_tripling_square_uniform(self):
        d = stationary(build_ulam(square_map(3.0), 9, 3))
        assert np.abs(d[0].values - 1 / 81).sum() <= 1e-9

    def test_gap_of_symmetric_map(self):
        op = build_ulam(symmetric_map(1.8), 200)
        d = stationary(op)
        x = op.cell_centers().ravel()
        h = 0.5 / 200
        gap = (x - h >= -0.1) & (x + h <= 0.1)
        assert sum(v.values[gap].sum() for v in d) <= 1e-6
        assert not lebesgue_equivalence_check(d)

    def test_density_invariants(self, slab_map):
        d = stationary(build_ulam(slab_map, 24))
        for v in d:
            assert v.values.min() >= 0
            assert v.values.sum() == pytest.approx(1, abs=1e-10)
            assert v.residual <= 1e-10

    def test_fixed_point(self):
        op = build_ulam(square_map(3.2, np.pi / 4), 24)
        d = stationary(op)[0]
        assert np.abs(op.P.T @ d.values - d.values).sum() <= 1e-8

    def test_not_converged(self, slab_map):
        with pytest.raises(NotConverged) as info:
            stationary(build_ulam(slab_map, 24), tol=1e-14, max_iter=3)
        assert info.value.residual > 1e-14
        assert info.value.last.shape == (576,)

    def test_periodic_class(self):
        # a deterministic 2-cycle: plain power iteration would oscillate
        P = sp.csr_matrix(np.array([[0, 1.0], [1.0, 0]]))
        d = stationary(P)
        assert np.allclose(d[0].values, 0.5)


class TestComponents:
    def test_doubling_single(self, doubling):
        c = ergodic_components(build_ulam(doubling, 32))
        assert c.count == 1 and (c.labels == 1).all()

    def test_tripling_square(self):
        c = ergodic_components(build_ulam(square_map(3.0), 18, 3))
        assert c.count == 1 and (c.labels == 1).all()

    def test_transient_labelled_zero(self):
        P = sp.csr_matrix(np.array([[0.5, 0.5, 0], [0, 1.0, 0], [0, 0, 1.0]]))
        c = ergodic_components(P)
        assert c.count == 2 and c.labels.tolist() == [0, 1, 2]

    def test_threshold(self):
        P = sp.csr_matrix(np.array([[0.99, 0.01], [0.0, 1.0]]))
        assert ergodic_components(P).labels.tolist() == [0, 1]
        assert ergodic_components(P, support_threshold=0.05).count == 2

    @pytest.mark.parametrize("beta, angle, N", [(1.4, 0.0, 40), (1.3, 0.7, 30), (2.4, 1.1, 24)])
    def test_against_networkx(self, beta, angle, N):
        op = build_ulam(RotBetaMap(beta, rotation(angle), LatticeDomain(np.eye(2), [-0.5, -0.5])), N)
        c = ergodic_components(op)
        G = nx.DiGraph()
        G.add_nodes_from(range(op.n_cells))
        coo = op.P.tocoo()
        G.add_edges_from(zip(coo.row.tolist(), coo.col.tolist()))
        attracting = [sorted(a) for a in nx.attracting_components(G)]
        assert c.count == len(attracting)
        ours = sorted(sorted(np.flatnonzero(c.labels == k).tolist()) for k in range(1, c.count + 1))
        assert ours == sorted(attracting)


class TestEquivalence:
    def test_doubling(self, doubling):
        assert lebesgue_equivalence_check(stationary(build_ulam(doubling, 64)))

    def test_theorem_b_regime(self):
        assert lebesgue_equivalence_check(stationary(build_ulam(square_map(3.2, np.pi / 4), 48)))

    def test_two_classes_rejected(self):
        P = sp.csr_matrix(np.eye(2))
        assert not lebesgue_equivalence_check(stationary(P))


def l1_refinement(T, Ns, s):
    out = []
    for N in Ns:
        a = stationary(build_ulam(T, N, s))[0].values.reshape(N, N)
        b = stationary(build_ulam(T, 2 * N, s))[0].values.reshape(2 * N, 2 * N)
        up = np.repeat(np.repeat(a, 2, 0), 2, 1) / 4
        out.append(np.abs(up - b).sum())
    return out


def test_grid_refinement_consistency():
    # sampling noise of order 1/s masks the discretisation error for most
    # maps; at s=16 this map shows the expected decay
    d = l1_refinement(square_map(3.2, np.pi / 4), [16, 32, 64], 16)
    assert d[0] > d[1] > d[2]


def test_density_rows(doubling):
    op = build_ulam(doubling, 4)
    rows = list(density_rows(op, stationary(op)))
    assert rows[0] == (0, 0.125, 0.25, 1)
    assert len(rows) == 4
