import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotbeta.dynamics import (
    NodeBudgetExceeded,
    RotBetaMap,
    check_isometry,
    check_property_s,
    check_slab_condition,
    hole_radii,
    preimage_tree,
    reflection,
    rotation,
)
from rotbeta.geometry import LatticeDomain


def square_map(beta, angle=0.0):
    return RotBetaMap(beta, rotation(angle), LatticeDomain.unit_cube(2))


def random_maps(rng, n):
    out = []
    for _ in range(n):
        m = int(rng.integers(1, 3))
        beta = rng.uniform(1.1, 4.0)
        if m == 1:
            dom = LatticeDomain([[rng.uniform(0.5, 2.0)]], [rng.uniform(-1, 1)])
            M = np.array([[rng.choice([-1.0, 1.0])]])
        else:
            th = rng.uniform(0.3, np.pi - 0.3)
            a, b = rng.uniform(0.5, 2.0, 2)
            dom = LatticeDomain.from_vectors([[a, 0], [b * np.cos(th), b * np.sin(th)]],
                                             xi=rng.uniform(-1, 1, 2))
            M = rotation(rng.uniform(0, 2 * np.pi)) if rng.random() < 0.7 else reflection(rng.uniform(0, np.pi))
        out.append(RotBetaMap(beta, M, dom))
    return out


class TestIsometry:
    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError):
            check_isometry([[1.0, 0.1], [0.0, 1.0]])

    def test_reflection_determinant(self):
        assert np.linalg.det(reflection(0.7)) == pytest.approx(-1.0)

    def test_map_rejects_small_beta(self):
        with pytest.raises(ValueError):
            square_map(1.0)


class TestStep:
    def test_doubling(self, doubling):
        s = doubling.step([0.625])
        assert s.image == pytest.approx([0.25]) and s.digit == pytest.approx([1.0])

    def test_tripling_square(self):
        s = square_map(3.0).step([0.5, 0.2])
        assert np.allclose(s.image, [0.5, 0.6]) and np.allclose(s.digit, [1, 0])

    def test_quarter_turn(self):
        T = square_map(2.0, np.pi / 2)
        s = T.step([0.25, 0.5])
        assert np.allclose(s.digit, [-1, 0])
        assert np.allclose(s.image, [0, 0.5], atol=1e-15)
        assert T.domain.contains(s.image)

    def test_outside(self, doubling):
        with pytest.raises(ValueError):
            doubling.step([1.2])

    def test_fragile_flag(self, doubling):
        s = doubling.step([0.5 - 1e-14])
        assert s.fragile

    def test_lattice_coordinate_conjugacy(self, rng):
        # digits computed independently in lattice coordinates
        for T in random_maps(rng, 5):
            dom = T.domain
            if T.m == 1:
                continue
            z = dom.to_ambient(rng.uniform(0, 1, (2000, 2)))
            A = dom.inv @ (T.beta * T.M) @ dom.basis  # conjugated linear part
            c = dom.coords(z)
            shift = dom.inv @ (T.beta * T.M @ dom.xi - dom.xi)
            k_lat = np.floor(c @ A.T + shift)
            s = T.step(z)
            assert np.array_equal(T.digit_coords(s.digit), k_lat.astype(int))

    def test_image_in_domain(self, rng):
        for T in random_maps(rng, 20):
            z = T.domain.to_ambient(rng.uniform(0, 1, (500, T.m)))
            assert T.domain.contains(T(z)).all()


class TestExpand:
    def test_binary(self, doubling):
        e = doubling.expand([0.625], 3)
        assert e.int_digits.ravel().tolist() == [1, 0, 1]
        assert e.reconstruct() == pytest.approx([0.625])

    def test_one_digit(self):
        e = square_map(3.0).expand([0.5, 0.2], 1)
        assert e.int_digits.tolist() == [[1, 0]]
        assert np.allclose(e.reconstruct(), [1 / 3, 0])
        assert np.linalg.norm([0.5, 0.2] - e.reconstruct()) <= np.sqrt(2) / 3

    def test_reconstruction_bound(self, rng):
        for T in random_maps(rng, 100):
            z = T.domain.to_ambient(rng.uniform(0, 1, T.m))
            e = T.expand(z, 20)
            P = e.partial_sums()
            for n in range(1, 21):
                assert np.linalg.norm(z - P[n - 1]) <= e.error_bound(n) * (1 + 1e-9) + 1e-13

    def test_n_positive(self, doubling):
        with pytest.raises(ValueError):
            doubling.expand([0.1], 0)


class TestPreimages:
    def test_nine(self):
        P = square_map(3.0).preimages([0.5, 0.5])
        expected = np.array([[(0.5 + i) / 3, (0.5 + j) / 3] for i in range(3) for j in range(3)])
        assert len(P) == 9
        assert np.allclose(np.sort(P, axis=0), np.sort(expected, axis=0))

    def test_nine_brute_force(self):
        # scan a wide window of lattice digits independently of the candidate set
        T = square_map(3.0)
        z = np.array([0.5, 0.5])
        ks = np.array(list(itertools.product(range(-6, 7), repeat=2)), float)
        cand = (z + ks) / 3
        assert T.domain.contains(cand).sum() == 9

    def test_doubling(self, doubling):
        assert np.allclose(np.sort(doubling.preimages([0.5]).ravel()), [0.25, 0.75])

    def test_forward_consistency(self, rng):
        maps = random_maps(rng, 10)
        for i in range(1000):
            T = maps[i % 10]
            z = T.domain.to_ambient(rng.uniform(0, 1, T.m))
            P = T.preimages(z)
            assert np.abs(T(P) - z).max(initial=0.0) <= 1e-9 * T.domain.diameter

    def test_window_brute_force_count(self, rng):
        for T in random_maps(rng, 10):
            z = T.domain.to_ambient(rng.uniform(0, 1, T.m))
            dom = T.domain
            r = int(np.ceil(T.beta * dom.diameter / np.linalg.svd(dom.basis, compute_uv=False).min())) + 3
            k0 = np.rint(dom.coords(T.beta * T.M @ dom.to_ambient(np.full(T.m, 0.5)) - z + dom.xi))
            ks = k0 + np.array(list(itertools.product(range(-r, r + 1), repeat=T.m)), float)
            cand = (z + ks @ T.domain.basis.T) @ T.M / T.beta
            assert dom.contains(cand).sum() == len(T.preimages(z))

    @pytest.mark.parametrize("T", [
        square_map(2.5, np.pi / 5),
        RotBetaMap(1.7, [[1.0]], LatticeDomain.unit_cube(1)),
        RotBetaMap(2.2, reflection(0.3), LatticeDomain.from_vectors([[1, 0], [0.4, 0.8]])),
    ])
    def test_mean_branch_count(self, T):
        rng = np.random.default_rng(7)
        z = T.domain.to_ambient(rng.uniform(0, 1, (10_000, T.m)))
        _, parent = T.preimages(z)
        counts = np.bincount(parent, minlength=len(z))
        target = T.beta ** T.m
        sigma = counts.std(ddof=1) / np.sqrt(len(z))
        assert abs(counts.mean() - target) <= 3 * sigma


class TestPreimageTree:
    def test_dyadic(self, doubling):
        levels, parents = preimage_tree(doubling, [0.0], 3)
        assert [len(L) for L in levels] == [1, 2, 4, 8]
        assert np.allclose(np.sort(levels[3].ravel()), np.arange(8) / 8)

    def test_81(self):
        levels, _ = preimage_tree(square_map(3.0), [0.5, 0.5], 2)
        assert len(levels[2]) == 81
        assert np.allclose(np.sort(np.unique(levels[2][:, 0])), (np.arange(9) + 0.5) / 9)

    def test_parents_and_forward_iteration(self, slab_map):
        levels, parents = preimage_tree(slab_map, [0.3, 1.2], 4)
        for i in range(1, 5):
            img = slab_map(levels[i])
            assert np.allclose(img, levels[i - 1][parents[i]], atol=1e-9)
            x = levels[i]
            for _ in range(i):
                x = slab_map(x)
            assert np.allclose(x, levels[0][0], atol=1e-8)

    def test_budget(self):
        T = square_map(3.0)
        with pytest.warns(RuntimeWarning):
            with pytest.raises(NodeBudgetExceeded) as info:
                preimage_tree(T, [0.5, 0.5], 4, budget=500)
        levels, _ = info.value.partial
        assert [len(L) for L in levels] == [1, 9, 81]


class TestHoles:
    def test_doubling_level_one(self, doubling):
        reps = hole_radii(doubling, [0.5], 1)
        assert reps[1].radius == pytest.approx(0.25, abs=reps[1].error + 1e-12)
        assert reps[1].count == 2

    def test_cumulative_monotone(self, slab_map):
        reps = hole_radii(slab_map, [0.3141, 1.2718], 4)
        r = [h.radius for h in reps]
        e = [h.error for h in reps]
        for i in range(len(r) - 1):
            assert r[i + 1] <= r[i] + e[i] + e[i + 1]

    def test_single_level_mode(self, doubling):
        reps = hole_radii(doubling, [0.5], 2, cumulative=False)
        assert not reps[2].cumulative and reps[2].count == 4
        # level 2 alone is {1/8, 3/8, 5/8, 7/8}: the largest gap is at an end or between
        assert reps[2].radius == pytest.approx(0.125, abs=reps[2].error + 1e-12)


class TestPropertyS:
    def test_tripling_square(self):
        rep = check_property_s(square_map(3.0), [0.5, 0.5], 2)
        assert rep.satisfied_at == 0
        assert rep.margins[0] == pytest.approx(3 - np.sqrt(2), abs=2 * rep.errors[0] + 1e-12)

    def test_doubling(self, doubling):
        assert check_property_s(doubling, [0.3], 0).satisfied_at == 0

    def test_small_beta(self):
        rep = check_property_s(square_map(1.2), [0.5, 0.5], 3)
        assert rep.margins[0] < 0
        assert len(rep.margins) >= 2


class TestSlabCondition:
    def test_holds(self, slab_map):
        assert check_slab_condition(slab_map, [1.0, 0.0])

    def test_fails(self):
        assert not check_slab_condition(square_map(2.5), [1.0, 0.0])

    def test_one_dimensional(self, rng):
        for beta in rng.uniform(1.1, 9, 5):
            T = RotBetaMap(beta, [[-1.0]], LatticeDomain([[1.3]], [0.2]))
            assert check_slab_condition(T, [1.3])

    def test_not_in_lattice(self, slab_map):
        with pytest.raises(ValueError):
            check_slab_condition(slab_map, [0.5, 0.0])

    def test_mixed_direction_rejected(self, slab_map):
        with pytest.raises(ValueError):
            check_slab_condition(slab_map, [1.0, 3.0])

    def test_scaled_eta_needs_single_translate(self, slab_map):
        # translates by 2*eta leave gaps the image cannot bridge
        assert not check_slab_condition(slab_map, [2.0, 0.0])

    @given(beta=st.floats(1.05, 4.0), angle=st.floats(0, 2 * np.pi))
    @settings(max_examples=40, deadline=None)
    def test_vertex_test_matches_dense_sampling(self, beta, angle):
        dom = LatticeDomain.from_vectors([[1.0, 0.0], [0.3, 2.0]])
        T = RotBetaMap(beta, rotation(angle), dom)
        t = np.linspace(0, 1, 41)
        g = np.stack(np.meshgrid(t, t), -1).reshape(-1, 2)
        img = beta * (dom.to_ambient(g) @ T.M.T)
        c2 = dom.coords(img)[:, 1]
        inside = bool((c2.min() >= -1e-9) and (c2.max() <= 1 + 1e-9))
        assert check_slab_condition(T, dom.vectors[0]) == inside
