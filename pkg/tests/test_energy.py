import numpy as np
import pytest

from curvseg.curvature import (
    CurvatureParams,
    EdgeSet,
    accumulate_edges,
    apply_contrast,
    decompose_cliques,
    enumerate_cliques,
)
from curvseg.energy import (
    AttractionMode,
    QPBEnergy,
    add_seeds,
    build_energy,
    dump_energy,
    evaluate,
    is_normal_form,
    load_energy,
    seed_penalty,
    to_normal_form,
    zero_energy,
)
from curvseg.lattice import GrayImage, SeedMask


def _single_edge(w, lam, mode):
    edges = EdgeSet(u=np.array([0]), v=np.array([1]), weight=np.array([float(w)]))
    return build_energy(edges, 2, lam=lam, mode=mode)


def _random_energy(rng, n, m=None, lo=-5.0, hi=5.0):
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    m = m if m is not None else rng.integers(1, len(all_pairs) + 1)
    pick = rng.choice(len(all_pairs), size=m, replace=False)
    edges = np.array([all_pairs[i] for i in pick], dtype=np.int64)
    return QPBEnergy(
        n=n,
        unary=rng.uniform(lo, hi, size=(n, 2)),
        edges=edges,
        tables=rng.uniform(lo, hi, size=(m, 4)),
        constant=float(rng.uniform(lo, hi)),
    )


def _all_labelings(n):
    for code in range(1 << n):
        yield np.array([(code >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)


class TestBuildEnergy:
    def test_magnitude_table(self):
        e = _single_edge(2.0, 1.0, AttractionMode.MAGNITUDE)
        np.testing.assert_allclose(e.tables[0], [-1.0, 2.0, 2.0, -1.0])
        assert np.all(e.unary == 0) and e.constant == 0

    def test_signed_negative_table(self):
        e = _single_edge(-1.0, 1.0, AttractionMode.SIGNED)
        np.testing.assert_allclose(e.tables[0], [0.5, -1.0, -1.0, 0.5])

    def test_empty_edges(self):
        e = build_energy(
            EdgeSet(u=np.empty(0, np.int64), v=np.empty(0, np.int64), weight=np.empty(0)),
            3,
        )
        for x in _all_labelings(3):
            assert evaluate(e, x) == 0.0

    def test_lambda_positive_required(self):
        with pytest.raises(ValueError):
            _single_edge(1.0, 0.0, AttractionMode.MAGNITUDE)


class TestEvaluate:
    def test_single_edge_lookups(self):
        e = _single_edge(2.0, 1.0, AttractionMode.MAGNITUDE)
        assert evaluate(e, [0, 1]) == 2.0
        assert evaluate(e, [0, 0]) == -1.0

    def test_rejects_unlabeled(self):
        e = zero_energy(2)
        with pytest.raises(ValueError, match="unlabeled"):
            evaluate(e, [0, -1])

    def test_zero_energy(self):
        e = zero_energy(4)
        for x in ([0, 0, 0, 0], [1, 0, 1, 0]):
            assert evaluate(e, x) == 0.0


class TestSeeds:
    def test_unary_dominance(self):
        e = add_seeds(zero_energy(2), (np.array([0]), np.array([1])), K=10.0)
        # optimal labelings are exactly those with x_0 = 1, x_1 = 0
        vals = {tuple(x): evaluate(e, x) for x in _all_labelings(2)}
        best = min(vals.values())
        assert [k for k, v in vals.items() if v == best] == [(1, 0)]

    def test_conflicting_seed(self):
        with pytest.raises(ValueError, match="conflicting seed"):
            add_seeds(zero_energy(2), (np.array([0]), np.array([0])), K=5.0)

    def test_both_classes_required(self):
        with pytest.raises(ValueError, match="both seed classes required"):
            add_seeds(zero_energy(2), (np.array([0]), np.array([], dtype=np.int64)))

    def test_two_node_exhaustive(self):
        e = _single_edge(1.0, 1.0, AttractionMode.MAGNITUDE)
        e = add_seeds(e, (np.array([0]), np.array([1])), K=100.0)
        vals = {tuple(x): evaluate(e, x) for x in _all_labelings(2)}
        assert min(vals, key=vals.get) == (1, 0)
        assert vals[(1, 0)] == 1.0  # cut term only

    def test_seedmask_input(self):
        labels = np.array([[1, 0], [0, 2]], dtype=np.int8)
        seeds = SeedMask(width=2, height=2, labels=labels)
        e = add_seeds(zero_energy(4), seeds, K=3.0)
        assert e.unary[0, 0] == 3.0 and e.unary[3, 1] == 3.0

    def test_difference_invariance_on_agreeing_labelings(self):
        rng = np.random.default_rng(11)
        e = _random_energy(rng, 5)
        seeded = add_seeds(e, (np.array([0]), np.array([4])), K=50.0)
        for _ in range(20):
            x = rng.integers(0, 2, 5)
            y = rng.integers(0, 2, 5)
            x[0] = y[0] = 1
            x[4] = y[4] = 0
            dx = evaluate(e, x) - evaluate(e, y)
            dy = evaluate(seeded, x) - evaluate(seeded, y)
            assert dx == pytest.approx(dy, abs=1e-9)

    def test_automatic_penalty_dominates(self):
        e = _single_edge(3.0, 2.0, AttractionMode.MAGNITUDE)
        K = seed_penalty(e)
        spread = e.tables[0].max() - e.tables[0].min()
        assert K == pytest.approx(1.0 + spread)


class TestNormalForm:
    def test_idempotent_on_normal(self):
        e = QPBEnergy(
            n=2,
            unary=np.array([[0.0, 2.0], [1.0, 0.0]]),
            edges=np.array([[0, 1]]),
            tables=np.array([[0.0, 3.0, 3.0, 0.0]]),
            constant=1.0,
        )
        assert is_normal_form(e)
        out = to_normal_form(e)
        np.testing.assert_array_equal(out.tables, e.tables)
        np.testing.assert_array_equal(out.unary, e.unary)
        assert out.constant == e.constant

    def test_attraction_table_preserved(self):
        e = _single_edge(2.0, 1.0, AttractionMode.MAGNITUDE)  # table (-1,2,2,-1)
        out = to_normal_form(e)
        assert is_normal_form(out)
        for x in _all_labelings(2):
            assert evaluate(out, x) == pytest.approx(evaluate(e, x), rel=1e-12)

    def test_random_energies_preserved(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            e = _random_energy(rng, 6)
            out = to_normal_form(e)
            assert is_normal_form(out)
            for _ in range(50):
                x = rng.integers(0, 2, 6)
                assert evaluate(out, x) == pytest.approx(evaluate(e, x), rel=1e-9)


class TestCrossRepresentation:
    @pytest.mark.parametrize("mode", list(AttractionMode))
    def test_pipeline_matches_clique_sum(self, mode):
        rng = np.random.default_rng(8)
        lam = 1.25
        for _ in range(5):
            img = GrayImage.from_array(rng.random((4, 5)))
            params = CurvatureParams(p=2.0, beta=10.0)
            cliques = apply_contrast(
                enumerate_cliques(img.width, img.height, params), img, params.beta
            )
            edges = accumulate_edges(decompose_cliques(cliques), img.num_pixels)
            e = build_energy(edges, img.num_pixels, lam=lam, mode=mode)
            for _ in range(10):
                x = rng.integers(0, 2, img.num_pixels)
                direct = (
                    cliques.contrast_weight
                    * (x[cliques.i] != x[cliques.j])
                    * (x[cliques.i] != x[cliques.k])
                ).sum()
                a = np.abs(edges.weight) if mode is AttractionMode.MAGNITUDE else edges.weight
                agree = (x[edges.u] == x[edges.v]).astype(float)
                direct -= lam * (a / 2.0 * agree).sum()
                assert evaluate(e, x) == pytest.approx(direct, rel=1e-9)


class TestSignedDegeneracy:
    def test_affine_identity_and_argmin_sets(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            n = int(rng.integers(2, 8))
            m = int(rng.integers(1, n * (n - 1) // 2 + 1))
            pick = rng.choice(n * (n - 1) // 2, size=m, replace=False)
            all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
            edges = EdgeSet(
                u=np.array([all_pairs[i][0] for i in pick]),
                v=np.array([all_pairs[i][1] for i in pick]),
                weight=rng.uniform(-3, 3, size=m),
            )
            lam = float(rng.uniform(0.5, 3.0))
            e_signed = build_energy(edges, n, lam=lam, mode=AttractionMode.SIGNED)
            wsum = edges.weight.sum()
            curv_vals, signed_vals = [], []
            for x in _all_labelings(n):
                cut = (edges.weight * (x[edges.u] != x[edges.v])).sum()
                curv_vals.append(cut)
                signed_vals.append(evaluate(e_signed, x))
                # E_signed = (1 + lam/2) E_curv - lam/2 * sum(w)
                assert signed_vals[-1] == pytest.approx(
                    (1 + lam / 2) * cut - lam / 2 * wsum, rel=1e-9, abs=1e-9
                )
            curv_vals = np.array(curv_vals)
            signed_vals = np.array(signed_vals)
            a = curv_vals <= curv_vals.min() + 1e-9
            b = signed_vals <= signed_vals.min() + 1e-9
            np.testing.assert_array_equal(a, b)


class TestMagnitudeSignRepair:
    @pytest.mark.parametrize("w", [0.5, 1.0, 3.75])
    def test_submodular_at_lambda_2(self, w):
        for lam in (2.0, 2.5, 4.0):
            e = to_normal_form(_single_edge(-w, lam, AttractionMode.MAGNITUDE))
            t = e.tables[0]
            assert t[0] + t[3] <= t[1] + t[2] + 1e-12

    @pytest.mark.parametrize("w", [0.5, 1.0, 3.75])
    def test_nonsubmodularity_decreases_below_2(self, w):
        def gap(lam):
            e = _single_edge(-w, lam, AttractionMode.MAGNITUDE)
            t = e.tables[0]
            return (t[0] + t[3]) - (t[1] + t[2])  # positive = nonsubmodular

        assert gap(1.5) < gap(1.0) < gap(0.5)
        assert gap(1.9) > 0  # still nonsubmodular below 2


def test_dump_load_roundtrip(tmp_path):
    rng = np.random.default_rng(12)
    e = _random_energy(rng, 5)
    path = tmp_path / "energy.txt"
    dump_energy(e, path)
    again = load_energy(path)
    header = path.read_text().splitlines()[0]
    assert header == f"p qpbe {e.n} {e.num_edges}"
    for _ in range(20):
        x = rng.integers(0, 2, 5)
        assert evaluate(again, x) == pytest.approx(evaluate(e, x), rel=1e-12)
