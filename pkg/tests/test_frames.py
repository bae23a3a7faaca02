import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import family, std_basis
from framedecomp import (
    InputError,
    Tolerances,
    VectorFamily,
    gen_shift_pair,
    gen_union_onb,
    gram,
    is_linearly_independent,
    omega_independence_margin,
    perturbation_distance,
    spectral_report,
    verify_orthogonal_decomposition,
)
from framedecomp.frames import frame_inequality_samples, riesz_inequality_samples


def toeplitz_extremes(n):
    """Closed-form extreme eigenvalues of tridiag(1/2; 1; 1/2) of size n."""
    c = math.cos(math.pi / (n + 1))
    return 1 - c, 1 + c


def brute_extremes(F):
    w = np.sort(np.linalg.eigvals(gram(F)).real)
    return w[0], w[-1]


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 64])
def test_toeplitz_closed_form_matches_brute_force(n):
    lo, hi = toeplitz_extremes(n)
    b_lo, b_hi = brute_extremes(gen_shift_pair(n))
    assert lo == pytest.approx(b_lo, abs=1e-12)
    assert hi == pytest.approx(b_hi, abs=1e-12)


class TestSpectralReport:
    def test_orthonormal_basis(self):
        r = spectral_report(gen_union_onb(5, 1, seed=0))
        assert r.frame_A == pytest.approx(1) and r.bessel_B == pytest.approx(1)
        assert r.riesz_lower == pytest.approx(1) and r.unit_norm and r.rank == 5

    def test_union_of_two_bases(self):
        r = spectral_report(gen_union_onb(4, 2, seed=1))
        assert r.frame_A == pytest.approx(2) and r.bessel_B == pytest.approx(2)
        assert r.riesz_lower == 0.0 and r.sigma_min_synthesis == 0.0

    @pytest.mark.parametrize("n", [3, 7, 20])
    def test_shift_pair(self, n):
        r = spectral_report(gen_shift_pair(n))
        lo, hi = toeplitz_extremes(n)
        assert r.bessel_B == pytest.approx(hi, abs=1e-12)
        assert r.riesz_lower == pytest.approx(lo, abs=1e-12)
        assert r.riesz_upper == r.bessel_B
        assert r.sigma_min_synthesis ** 2 == pytest.approx(r.riesz_lower, abs=1e-12)

    def test_empty(self):
        with pytest.raises(InputError):
            spectral_report(VectorFamily(3, []))

    def test_flags_non_unit(self):
        assert not spectral_report(family([[2.0, 0.0]])).unit_norm

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10**6), d=st.integers(1, 8), n=st.integers(1, 16))
    def test_invariants(self, seed, d, n):
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((n, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        F = VectorFamily(d, v)
        tol = Tolerances()
        r = spectral_report(F, tol)
        assert 0 <= r.frame_A <= r.bessel_B
        assert r.riesz_lower <= r.riesz_upper
        assert r.bessel_B >= 1 - tol.report_tol
        independent, margin = is_linearly_independent(F, tol)
        assert (r.riesz_lower > 0) == independent
        if independent:
            assert r.riesz_lower == pytest.approx(margin ** 2, abs=tol.report_tol)

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10**6), d=st.integers(1, 6), n=st.integers(1, 12))
    def test_frame_and_riesz_inequality_sampling(self, seed, d, n):
        rng = np.random.default_rng(seed)
        F = VectorFamily(d, rng.standard_normal((n, d)))
        r = spectral_report(F)
        sums = frame_inequality_samples(F, 1000, seed)
        assert np.all(sums >= r.frame_A - 1e-9) and np.all(sums <= r.bessel_B + 1e-9)
        csq, synth = riesz_inequality_samples(F, 1000, seed)
        slack = 1e-9 * (1 + csq)
        assert np.all(synth >= r.riesz_lower * csq - slack)
        assert np.all(synth <= r.riesz_upper * csq + slack)

    def test_complex_family(self):
        rng = np.random.default_rng(5)
        F = VectorFamily(3, rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
                         scalars="complex")
        r = spectral_report(F)
        s = np.linalg.svd(F.synthesis, compute_uv=False)
        assert r.bessel_B == pytest.approx(s[0] ** 2)
        assert r.riesz_lower == pytest.approx(s[-1] ** 2)


class TestIndependence:
    def test_orthonormal(self):
        ok, margin = is_linearly_independent(std_basis(4))
        assert ok and margin == pytest.approx(1)

    def test_repeated_vector(self):
        F = family([[1.0, 0, 0], [0, 1.0, 0], [1.0, 0, 0]])
        ok, margin = is_linearly_independent(F)
        assert not ok and margin <= 1e-9
        assert omega_independence_margin(F) <= 1e-9

    @pytest.mark.parametrize("n", [1, 4, 7, 15])
    def test_shift_pair_margin(self, n):
        ok, margin = is_linearly_independent(gen_shift_pair(n))
        assert ok
        assert margin ** 2 == pytest.approx(toeplitz_extremes(n)[0], abs=1e-12)

    def test_omega_margin_shift_pair_7(self):
        expected = math.sqrt(1 - math.cos(math.pi / 8))
        assert omega_independence_margin(gen_shift_pair(7)) == pytest.approx(expected, abs=1e-12)

    def test_omega_margin_orthonormal(self):
        assert omega_independence_margin(std_basis(3)) == pytest.approx(1)


class TestPerturbationDistance:
    def test_identity(self):
        F = gen_shift_pair(4)
        assert perturbation_distance(F, F) == (0.0, True)

    def test_single_shift(self):
        F = std_basis(3)
        delta = 0.3
        u = np.array([0.0, 0.6, 0.8])
        G = F.with_vectors(np.vstack([F.vectors[0] + delta * u, F.vectors[1:]]))
        energy, ok = perturbation_distance(F, G)
        assert energy == pytest.approx(delta ** 2) and ok

    def test_escape_from_span(self):
        F = family([[1.0, 0, 0], [0, 1.0, 0]])
        G = family([[1.0, 0, 0], [0, 1.0, 0.1]])
        assert perturbation_distance(F, G)[1] is False

    def test_shape_mismatch(self):
        with pytest.raises(InputError):
            perturbation_distance(std_basis(3), std_basis(2))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 8), data=st.data())
    def test_simultaneous_reordering(self, seed, n, data):
        rng = np.random.default_rng(seed)
        F = VectorFamily(4, rng.standard_normal((n, 4)))
        G = VectorFamily(4, rng.standard_normal((n, 4)))
        perm = data.draw(st.permutations(range(n)))
        a = perturbation_distance(F, G)[0]
        b = perturbation_distance(G.permuted(perm), F.permuted(perm))[0]
        assert a == pytest.approx(b, rel=1e-12)


class TestOrthogonalDecomposition:
    def test_singletons_of_orthonormal(self):
        ok, worst = verify_orthogonal_decomposition(std_basis(4), [[1], [2], [3], [4]])
        assert ok and worst == 0

    def test_shift_pair_pairs_fail(self):
        ok, worst = verify_orthogonal_decomposition(gen_shift_pair(4), [[1, 2], [3, 4]])
        assert not ok and worst == pytest.approx(0.5)

    @pytest.mark.parametrize("blocks", [[[1, 2], [3]], [[1, 2], [2, 3, 4]], [[1, 2, 3, 4, 9]]])
    def test_not_a_partition(self, blocks):
        with pytest.raises(InputError):
            verify_orthogonal_decomposition(gen_shift_pair(4), blocks)

    @settings(max_examples=25, deadline=None)
    @given(data=st.data())
    def test_permutation_invariant(self, data):
        F = gen_shift_pair(6)
        blocks = [[1, 2], [3], [4, 5, 6]]
        shuffled = [data.draw(st.permutations(b)) for b in data.draw(st.permutations(blocks))]
        assert verify_orthogonal_decomposition(F, blocks) == \
            verify_orthogonal_decomposition(F, shuffled)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), sizes=st.lists(st.integers(1, 3), min_size=1, max_size=4))
    def test_exact_pass_means_block_diagonal_gram(self, seed, sizes):
        # block-diagonal by construction: disjoint coordinate supports
        rng = np.random.default_rng(seed)
        d = sum(sizes)
        rows, blocks, start, label = [], [], 0, 1
        for s in sizes:
            block = []
            for _ in range(s):
                v = np.zeros(d)
                v[start:start + s] = rng.standard_normal(s)
                rows.append(v)
                block.append(label)
                label += 1
            blocks.append(block)
            start += s
        F = VectorFamily(d, rows)
        zero = Tolerances(ortho_tol=1e-300)
        ok, worst = verify_orthogonal_decomposition(F, blocks, zero)
        assert ok and worst == 0.0
        G = gram(F)
        owner = {lab: b for b, blk in enumerate(blocks) for lab in blk}
        for i in range(len(F)):
            for j in range(len(F)):
                if owner[i + 1] != owner[j + 1]:
                    assert G[i, j] == 0.0
