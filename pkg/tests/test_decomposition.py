"""The two exact attributions of D^2 and the assembled inverses."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_data, random_data
from levdiag.auxreg import PermutedFactors
from levdiag.decomposition import (
    decomposition_one,
    decomposition_one_components,
    decomposition_two,
    decomposition_two_all,
    inverse_cov_via_permutations,
    leverage_drop,
    partitioned_inverse,
)
from levdiag.errors import IndexOutOfRange, SingleRegressor
from levdiag.leverage import mahalanobis_sq_all
from levdiag.linalg import center, cholesky, covariance, direct_inverse


def pipeline(data):
    cen = center(data)
    return cen, PermutedFactors(cen)


class TestInverseViaPermutations:
    def test_orthogonal_columns_diagonal(self, orth4):
        cen, fac = pipeline(orth4)
        np.testing.assert_allclose(
            inverse_cov_via_permutations(cen, fac), np.eye(2), atol=1e-14
        )

    def test_single_column(self, line5):
        cen, fac = pipeline(line5)
        out = inverse_cov_via_permutations(cen, fac)
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(0.5, rel=1e-15)

    @pytest.mark.parametrize("p", [2, 4, 7, 10])
    def test_matches_direct_inverse(self, p):
        data = random_data(300 + p, 20 * p, p)
        cen, fac = pipeline(data)
        got = inverse_cov_via_permutations(cen, fac)
        want = direct_inverse(fac.covariance_matrix)
        scale = max(1.0, np.abs(want).max())
        assert np.abs(got - want).max() <= 1e-8 * scale
        assert np.abs(got - got.T).max() <= 1e-8 * scale


class TestPartitionedInverse:
    def test_orthogonal_columns(self, orth4):
        cen, fac = pipeline(orth4)
        out = partitioned_inverse(cen, fac)
        np.testing.assert_allclose(out, np.eye(2), atol=1e-14)
        assert out[1, 1] == pytest.approx(1.0 / covariance(cen)[1, 1], rel=1e-12)

    def test_corner_is_factor_entry_squared(self):
        cen, fac = pipeline(random_data(9, 40, 5))
        bpp = fac.base.b_pp
        assert partitioned_inverse(cen, fac)[4, 4] == bpp * bpp

    @pytest.mark.parametrize("p", [2, 5, 10])
    def test_matches_direct_inverse(self, p):
        cen, fac = pipeline(random_data(400 + p, 30 * p, p))
        want = direct_inverse(fac.covariance_matrix)
        scale = max(1.0, np.abs(want).max())
        assert np.abs(partitioned_inverse(cen, fac) - want).max() <= 1e-8 * scale

    def test_single_regressor_errors(self, line5):
        cen, fac = pipeline(line5)
        with pytest.raises(SingleRegressor):
            partitioned_inverse(cen, fac)


class TestDecompositionOne:
    def test_orthogonal_terms_are_squared_z(self, orth4):
        cen, fac = pipeline(orth4)
        d2 = mahalanobis_sq_all(cen, fac.base)
        for r in range(4):
            terms = decomposition_one(cen, r, fac)
            for t in terms:
                assert t.inflation == 1.0
                assert t.term == pytest.approx(t.marginal_z**2, rel=1e-12)
            assert sum(t.term for t in terms) == pytest.approx(d2[r], rel=1e-12)

    def test_single_regressor(self, line5):
        cen, fac = pipeline(line5)
        terms = decomposition_one(cen, 0, fac)
        assert len(terms) == 1
        assert terms[0].term == pytest.approx(2.0, rel=1e-12)

    def test_sum_identity_random(self):
        data = random_data(42, 50, 5)
        cen, fac = pipeline(data)
        d2 = mahalanobis_sq_all(cen, fac.base)
        for r in range(50):
            total = sum(t.term for t in decomposition_one(cen, r, fac))
            assert abs(total - d2[r]) <= 1e-9 * d2[r]

    @settings(max_examples=25, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        n=st.integers(13, 120),
        p=st.integers(1, 12),
    )
    def test_sum_identity_property(self, seed, n, p):
        n = max(n, p + 2)
        cen, fac = pipeline(random_data(seed, n, p))
        d2 = mahalanobis_sq_all(cen, fac.base)
        _, _, _, terms = decomposition_one_components(cen, fac)
        sums = terms.sum(axis=1)
        assert np.abs(sums - d2).max() <= 1e-9 * max(1.0, d2.max())

    def test_components_match_per_row(self):
        cen, fac = pipeline(random_data(77, 30, 4))
        infl, u, z, terms = decomposition_one_components(cen, fac)
        for r in (0, 11, 29):
            for t in decomposition_one(cen, r, fac):
                assert t.inflation == infl[t.regressor]
                assert t.aux_residual == u[r, t.regressor]
                assert t.marginal_z == z[r, t.regressor]
                assert t.term == terms[r, t.regressor]

    def test_terms_can_be_negative(self):
        # Signed factors: a fixed correlated dataset exhibits a negative term.
        rng = np.random.default_rng(2)
        base = rng.standard_normal(40)
        second = base + 0.3 * rng.standard_normal(40)
        third = rng.standard_normal(40)
        cen, fac = pipeline(make_data(np.column_stack([base, second, third])))
        _, _, _, terms = decomposition_one_components(cen, fac)
        assert terms.min() < 0.0

    def test_column_reorder_equivariance(self):
        data = random_data(88, 35, 5)
        cen, fac = pipeline(data)
        order = [3, 0, 4, 1, 2]
        reordered = make_data(
            data.values[:, order], names=[data.column_names[k] for k in order]
        )
        cen2, fac2 = pipeline(reordered)
        for r in (0, 17):
            by_name = {
                data.column_names[t.regressor]: t for t in decomposition_one(cen, r, fac)
            }
            for t in decomposition_one(cen2, r, fac2):
                match = by_name[reordered.column_names[t.regressor]]
                assert t.term == pytest.approx(match.term, rel=1e-9, abs=1e-12)
                assert t.inflation == pytest.approx(match.inflation, rel=1e-9)

    def test_row_out_of_range(self, orth4):
        cen, fac = pipeline(orth4)
        with pytest.raises(IndexOutOfRange):
            decomposition_one(cen, 4, fac)


class TestDecompositionTwo:
    def test_orthogonal_split(self, orth4):
        cen, fac = pipeline(orth4)
        _, _, z, _ = decomposition_one_components(cen, fac)
        for r in range(4):
            for j in range(2):
                res = decomposition_two(cen, j, r, fac)
                other = 1 - j
                assert res.residual_sq == pytest.approx(z[r, j] ** 2, rel=1e-12)
                assert res.subset_dist_sq == pytest.approx(z[r, other] ** 2, rel=1e-12)

    def test_single_regressor_empty_subset(self, line5):
        cen, fac = pipeline(line5)
        d2 = mahalanobis_sq_all(cen, fac.base)
        for r in range(5):
            res = decomposition_two(cen, 0, r, fac)
            assert res.subset_dist_sq == 0.0
            assert res.residual_sq == pytest.approx(d2[r], rel=1e-12, abs=1e-15)

    def test_sum_identity_and_subset_oracle(self):
        data = random_data(2024, 50, 5)
        cen, fac = pipeline(data)
        d2 = mahalanobis_sq_all(cen, fac.base)
        for j in range(5):
            subset, residual_sq = decomposition_two_all(cen, j, fac)
            np.testing.assert_allclose(subset + residual_sq, d2, rtol=1e-9)
            keep = [k for k in range(5) if k != j]
            sub = make_data(data.values[:, keep])
            sub_cen = center(sub)
            sub_pair = cholesky(covariance(sub_cen))
            oracle = mahalanobis_sq_all(sub_cen, sub_pair)
            np.testing.assert_allclose(subset, oracle, rtol=1e-8, atol=1e-8)

    def test_matches_single_row_api(self):
        cen, fac = pipeline(random_data(15, 20, 3))
        for j in range(3):
            subset, residual_sq = decomposition_two_all(cen, j, fac)
            for r in (0, 9, 19):
                res = decomposition_two(cen, j, r, fac)
                assert res.subset_dist_sq == subset[r]
                assert res.residual_sq == residual_sq[r]
                assert res.total == res.subset_dist_sq + res.residual_sq

    def test_coherent_with_attribution_terms(self):
        # The removal remainder for j is the square of the j-th scaled
        # auxiliary residual from the per-regressor attribution.
        cen, fac = pipeline(random_data(33, 40, 6))
        _, u, _, _ = decomposition_one_components(cen, fac)
        for j in range(6):
            _, residual_sq = decomposition_two_all(cen, j, fac)
            np.testing.assert_allclose(residual_sq, u[:, j] ** 2, rtol=1e-9)

    def test_nonnegative_parts(self):
        cen, fac = pipeline(random_data(91, 60, 7))
        for j in range(7):
            subset, residual_sq = decomposition_two_all(cen, j, fac)
            assert subset.min() >= -1e-12
            assert residual_sq.min() >= 0.0

    def test_index_errors(self, orth4):
        cen, fac = pipeline(orth4)
        with pytest.raises(IndexOutOfRange):
            decomposition_two(cen, 2, 0, fac)
        with pytest.raises(IndexOutOfRange):
            decomposition_two(cen, 0, 4, fac)


class TestLeverageDrop:
    def test_equals_recomputed_difference(self):
        data = random_data(7, 40, 4)
        cen, fac = pipeline(data)
        d2 = mahalanobis_sq_all(cen, fac.base)
        h_full = (1.0 + d2) / 40
        for j in range(4):
            keep = [k for k in range(4) if k != j]
            sub_cen = center(make_data(data.values[:, keep]))
            sub_d2 = mahalanobis_sq_all(sub_cen, cholesky(covariance(sub_cen)))
            h_sub = (1.0 + sub_d2) / 40
            for r in range(40):
                drop = leverage_drop(cen, j, r, fac)
                assert drop == pytest.approx(h_full[r] - h_sub[r], abs=1e-10)

    def test_orthogonal_drop_is_squared_z_over_n(self, orth4):
        cen, fac = pipeline(orth4)
        _, _, z, _ = decomposition_one_components(cen, fac)
        for j in range(2):
            for r in range(4):
                assert leverage_drop(cen, j, r, fac) == pytest.approx(
                    z[r, j] ** 2 / 4, rel=1e-12
                )

    def test_zero_when_centered_and_orthogonal(self):
        # Row sits on the mean of an orthogonal regressor: removing that
        # regressor cannot change the row's leverage.
        data = make_data(
            [[1.0, 0.0], [1.0, 0.0], [-1.0, 2.0], [-1.0, 1.0], [1.0, 0.0], [-1.0, -3.0]]
        )
        cen, fac = pipeline(data)
        assert cen.mean[1] == 0.0
        assert float(cen.tilde_x[:, 0] @ cen.tilde_x[:, 1]) == 0.0
        assert leverage_drop(cen, 1, 0, fac) == 0.0
