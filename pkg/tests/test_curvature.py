import math

import numpy as np
import pytest

from curvseg.curvature import (
    CurvatureParams,
    EdgeSet,
    accumulate_edges,
    apply_contrast,
    decompose_cliques,
    dump_effective_edges,
    effective_edges,
    enumerate_cliques,
)
from curvseg.lattice import GrayImage, neighbors


def _uniform(w, h, value=0.5):
    return GrayImage.from_array(np.full((h, w), value))


def _find_clique(cs, i, j, k):
    for idx in range(len(cs)):
        if (cs.i[idx], cs.j[idx], cs.k[idx]) == (i, j, k):
            return cs.clique(idx)
    raise AssertionError(f"clique ({i},{j},{k}) missing")


class TestEnumerate:
    def test_collinear_arms_max_penalty(self):
        cs = enumerate_cliques(5, 5, CurvatureParams(p=2.0))
        c = _find_clique(cs, 12, 11, 13)  # left and right of center
        assert c.alpha == pytest.approx(math.pi)
        assert c.base_weight == pytest.approx(math.pi**2, rel=1e-12)

    def test_axial_plus_adjacent_diagonal(self):
        cs = enumerate_cliques(5, 5, CurvatureParams(p=2.0))
        c = _find_clique(cs, 12, 11, 16)  # left arm + down-left diagonal
        assert c.alpha == pytest.approx(math.pi / 4)
        assert c.base_weight == pytest.approx((math.pi / 4) ** 2, rel=1e-12)

    def test_two_diagonals_right_angle(self):
        cs = enumerate_cliques(5, 5, CurvatureParams(p=2.0))
        c = _find_clique(cs, 12, 6, 16)  # up-left and down-left diagonals
        assert c.alpha == pytest.approx(math.pi / 2)
        assert c.base_weight == pytest.approx((math.pi / 2) ** 2 / math.sqrt(2), rel=1e-12)

    def test_3x3_count_is_80(self):
        cs = enumerate_cliques(3, 3, CurvatureParams())
        assert len(cs) == 80  # 4*C(3,2) + 4*C(5,2) + C(8,2)

    @pytest.mark.parametrize("w,h", [(2, 2), (4, 3), (5, 5)])
    def test_count_matches_degree_oracle(self, w, h):
        expected = sum(
            math.comb(len(neighbors(i, w, h)), 2) for i in range(w * h)
        )
        assert len(enumerate_cliques(w, h, CurvatureParams())) == expected

    def test_arms_ordered_and_in_range(self):
        cs = enumerate_cliques(4, 4, CurvatureParams())
        assert np.all(cs.j < cs.k)
        assert cs.alpha.min() >= math.pi / 4 - 1e-12
        assert cs.alpha.max() <= math.pi + 1e-12

    def test_too_small_lattice(self):
        with pytest.raises(ValueError):
            enumerate_cliques(1, 5, CurvatureParams())

    def test_p_exponent(self):
        cs1 = enumerate_cliques(3, 3, CurvatureParams(p=1.0))
        cs3 = enumerate_cliques(3, 3, CurvatureParams(p=3.0))
        np.testing.assert_allclose(cs3.base_weight, cs1.base_weight * cs1.alpha**2)


class TestContrast:
    def test_equal_intensities_identity(self):
        img = _uniform(4, 4)
        cs = apply_contrast(enumerate_cliques(4, 4, CurvatureParams()), img, beta=20.0)
        np.testing.assert_array_equal(cs.contrast_weight, cs.base_weight)

    def test_beta_zero_identity(self):
        rng = np.random.default_rng(1)
        img = GrayImage.from_array(rng.random((4, 4)))
        cs = apply_contrast(enumerate_cliques(4, 4, CurvatureParams()), img, beta=0.0)
        np.testing.assert_array_equal(cs.contrast_weight, cs.base_weight)

    def test_step_contrast_value(self):
        # g(i)=1, g(j)=0, g(k)=1, beta=20 -> base * exp(-20)
        img = GrayImage.from_array(np.array([[0.0, 1.0, 1.0]] * 2))
        cs = apply_contrast(enumerate_cliques(3, 2, CurvatureParams()), img, beta=20.0)
        c = next(
            cs.clique(idx)
            for idx in range(len(cs))
            if (cs.i[idx], cs.j[idx], cs.k[idx]) == (1, 0, 2)
        )
        assert c.contrast_weight == pytest.approx(
            c.base_weight * math.exp(-20.0), rel=1e-12
        )

    def test_monotone_in_difference(self):
        base = enumerate_cliques(3, 3, CurvatureParams())
        img1 = GrayImage.from_array(np.full((3, 3), 0.5))
        img2 = GrayImage.from_array(
            np.where(np.arange(9).reshape(3, 3) == 4, 1.0, 0.5)
        )
        w1 = apply_contrast(base, img1, 20.0).contrast_weight
        w2 = apply_contrast(base, img2, 20.0).contrast_weight
        assert np.all(w2 <= w1 + 1e-15)

    def test_intensity_shift_invariance(self):
        rng = np.random.default_rng(5)
        vals = rng.random((4, 4)) * 0.5
        base = enumerate_cliques(4, 4, CurvatureParams())
        w1 = apply_contrast(base, GrayImage.from_array(vals), 17.0).contrast_weight
        w2 = apply_contrast(base, GrayImage.from_array(vals + 0.25), 17.0).contrast_weight
        np.testing.assert_allclose(w1, w2, rtol=1e-12)


class TestDecompose:
    def _random_cliques(self, seed=0):
        rng = np.random.default_rng(seed)
        img = GrayImage.from_array(rng.random((5, 5)))
        params = CurvatureParams(p=float(rng.uniform(1, 3)), beta=float(rng.uniform(0, 30)))
        cs = enumerate_cliques(5, 5, params)
        return apply_contrast(cs, img, params.beta)

    def test_identity_all_assignments(self):
        cs = self._random_cliques()
        edges = decompose_cliques(cs)
        m = len(cs)
        eu, ev, ew = edges.u.reshape(3, m), edges.v.reshape(3, m), edges.weight.reshape(3, m)
        for xi in (0, 1):
            for xj in (0, 1):
                for xk in (0, 1):
                    x = {"i": xi, "j": xj, "k": xk}
                    lab = {}
                    val = np.zeros(m)
                    for row, (a, b) in enumerate((("i", "j"), ("i", "k"), ("j", "k"))):
                        val += ew[row] * np.abs(x[a] - x[b])
                    expected = cs.contrast_weight * (xi != xj) * (xi != xk)
                    np.testing.assert_allclose(val, expected, rtol=1e-12, atol=1e-15)

    def test_both_arms_cut_pays_full(self):
        cs = self._random_cliques(1)
        edges = decompose_cliques(cs)
        m = len(cs)
        w = edges.weight.reshape(3, m)
        # (1,0,0): wc/2 + wc/2 - 0
        np.testing.assert_allclose(w[0] + w[1], cs.contrast_weight, rtol=1e-12)

    def test_requires_contrast(self):
        cs = enumerate_cliques(3, 3, CurvatureParams())
        with pytest.raises(ValueError, match="contrast"):
            decompose_cliques(cs)


class TestAccumulate:
    def test_exact_cancellation_dropped(self):
        edges = EdgeSet(
            u=np.array([0, 0]), v=np.array([1, 1]), weight=np.array([1.0, -1.0])
        )
        out = accumulate_edges(edges, 2)
        assert len(out) == 0

    def test_single_clique_weights(self):
        img = _uniform(2, 2, 1.0)
        cs = apply_contrast(enumerate_cliques(2, 2, CurvatureParams()), img, 20.0)
        one = type(cs)(
            width=2,
            height=2,
            i=cs.i[:1],
            j=cs.j[:1],
            k=cs.k[:1],
            alpha=cs.alpha[:1],
            base_weight=np.array([2.0]),
            contrast_weight=np.array([2.0]),
        )
        out = accumulate_edges(decompose_cliques(one), 4)
        assert sorted(out.weight.tolist()) == [-1.0, 1.0, 1.0]

    def test_sorted_unique_pairs(self):
        out = effective_edges(_uniform(5, 4), CurvatureParams())
        keys = out.u * 20 + out.v
        assert np.all(np.diff(keys) > 0)
        assert np.all(out.u < out.v)

    def test_scaling_leaves_base_weights(self):
        # base weights depend only on geometry, not intensities
        a = enumerate_cliques(4, 4, CurvatureParams())
        b = enumerate_cliques(4, 4, CurvatureParams())
        np.testing.assert_array_equal(a.base_weight, b.base_weight)


def test_dump_format(tmp_path):
    out = effective_edges(_uniform(3, 3), CurvatureParams())
    path = tmp_path / "edges.txt"
    dump_effective_edges(out, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == len(out)
    u, v, w = lines[0].split()
    assert int(u) < int(v)
    assert float(w) == pytest.approx(out.weight[0], rel=1e-11)


def test_weights_nonnegative_until_decomposition():
    rng = np.random.default_rng(2)
    img = GrayImage.from_array(rng.random((4, 4)))
    params = CurvatureParams()
    cs = apply_contrast(enumerate_cliques(4, 4, params), img, params.beta)
    assert cs.base_weight.min() > 0
    assert cs.contrast_weight.min() >= 0
    assert np.all(cs.contrast_weight <= cs.base_weight + 1e-15)
