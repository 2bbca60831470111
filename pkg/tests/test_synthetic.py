"""Seeded scenario generators and the planted-structure guarantees."""

import numpy as np
import pytest

from levdiag.auxreg import PermutedFactors, standardized_aux_residuals_all
from levdiag.errors import BadSpec
from levdiag.linalg import center
from levdiag.synthetic import (
    AuxOutlier,
    CollinearPair,
    LeverageSweep,
    MarginalOutlier,
    ScenarioSpec,
    dataset_at,
    generate,
    parse_scenario,
    scenario_to_text,
    sweep_leverage,
    sweep_trajectory,
)


class TestGenerate:
    def test_deterministic(self):
        spec = ScenarioSpec(seed=123, n=30, p=4)
        a = generate(spec)
        b = generate(spec)
        assert a.values.tobytes() == b.values.tobytes()
        assert a.column_names == b.column_names

    def test_seed_changes_data(self):
        a = generate(ScenarioSpec(seed=1, n=20, p=3))
        b = generate(ScenarioSpec(seed=2, n=20, p=3))
        assert a.values.tobytes() != b.values.tobytes()

    def test_marginal_outlier_dominates(self):
        spec = ScenarioSpec(
            seed=11, n=200, p=5, plant=MarginalOutlier(row=0, col=0, z_target=8.0)
        )
        cen = center(generate(spec))
        z = cen.tilde_x / cen.std[None, :]
        # shrinkage from the planted point moving the mean is expected
        assert abs(z[0, 0]) >= 6.0
        assert np.unravel_index(np.abs(z).argmax(), z.shape) == (0, 0)

    def test_aux_outlier_dominates_residuals(self):
        spec = ScenarioSpec(seed=11, n=200, p=5, plant=AuxOutlier(row=3, col=2, offset=6.0))
        cen = center(generate(spec))
        factors = PermutedFactors(cen)
        u = standardized_aux_residuals_all(cen, 2, factors)
        assert int(np.abs(u).argmax()) == 3

    def test_collinear_pair_correlation(self):
        spec = ScenarioSpec(
            seed=5, n=100, p=3, plant=CollinearPair(col_a=0, col_b=1, noise_sd=1e-3)
        )
        data = generate(spec)
        r = np.corrcoef(data.values[:, 0], data.values[:, 1])[0, 1]
        assert r**2 > 0.99

    def test_bad_specs(self):
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=1, p=3)
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=3, plant=MarginalOutlier(10, 0, 5.0))
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=3, plant=MarginalOutlier(0, 3, 5.0))
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=1, plant=AuxOutlier(0, 0, 5.0))
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=3, plant=CollinearPair(1, 1, 0.1))
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=2, plant=LeverageSweep(0, (0.0, 0.0), (1.0,)))
        with pytest.raises(BadSpec):
            ScenarioSpec(seed=0, n=10, p=2, plant=LeverageSweep(0, (1.0, 0.0), ()))


class TestSweep:
    def spec(self, t_values=(0.0, 0.5, 1.0, 2.0, 4.0)):
        return ScenarioSpec(
            seed=31,
            n=60,
            p=3,
            plant=LeverageSweep(row=4, direction=(1.0, 0.5, -0.25), t_values=t_values),
        )

    def test_t_zero_row_sits_at_mean(self):
        pts = sweep_leverage(self.spec(t_values=(0.0,)))
        assert pts[0].record.mahalanobis_sq == pytest.approx(0.0, abs=1e-12)

    def test_distance_strictly_grows_when_t_doubles(self):
        pts = sweep_leverage(self.spec(t_values=(1.0, 2.0, 4.0)))
        d = [pt.record.mahalanobis_sq for pt in pts]
        assert d[0] < d[1] < d[2]

    def test_leverage_nondecreasing(self):
        pts = sweep_leverage(self.spec())
        h = [pt.record.leverage for pt in pts]
        assert all(a <= b + 1e-12 for a, b in zip(h, h[1:]))

    def test_sweep_point_carries_attribution(self):
        pts = sweep_leverage(self.spec(t_values=(2.0,)))
        terms = pts[0].terms
        assert len(terms) == 3
        total = sum(t.term for t in terms)
        assert total == pytest.approx(pts[0].record.mahalanobis_sq, rel=1e-9)

    def test_inflation_grows_when_sweeping_a_collinear_pair(self):
        # A point pushed out along the shared direction of an almost
        # collinear pair strengthens the pair's correlation: the inflation
        # factor of the pair members grows with t.
        spec = ScenarioSpec(seed=2024, n=120, p=4, plant=CollinearPair(0, 1, 1e-3))
        base = generate(spec)
        pts = sweep_trajectory(
            base, row=5, direction=(1.0, 1.0, 0.0, 0.0), t_values=(1.0, 4.0, 16.0, 64.0)
        )
        infl = [pt.terms[0].inflation for pt in pts]
        assert all(a < b for a, b in zip(infl, infl[1:]))
        h = [pt.record.leverage for pt in pts]
        assert all(a <= b + 1e-12 for a, b in zip(h, h[1:]))

    def test_requires_sweep_plant(self):
        with pytest.raises(BadSpec):
            sweep_leverage(ScenarioSpec(seed=0, n=10, p=2))

    def test_dataset_at_fixed_point(self):
        base = generate(ScenarioSpec(seed=9, n=25, p=2))
        d = np.array([1.0, -2.0])
        data = dataset_at(base, 3, d, 1.5)
        mean = data.values.mean(axis=0)
        np.testing.assert_allclose(data.values[3], mean + 1.5 * d, atol=1e-12)


class TestScenarioConfig:
    def test_round_trip(self):
        specs = [
            ScenarioSpec(seed=42, n=50, p=3),
            ScenarioSpec(seed=1, n=30, p=4, plant=MarginalOutlier(2, 1, 7.5)),
            ScenarioSpec(seed=2, n=30, p=4, plant=AuxOutlier(0, 3, -4.0)),
            ScenarioSpec(seed=3, n=30, p=4, plant=CollinearPair(0, 2, 0.01)),
            ScenarioSpec(
                seed=4, n=30, p=2, plant=LeverageSweep(5, (1.0, -1.0), (0.5, 1.0, 2.0))
            ),
        ]
        for spec in specs:
            assert parse_scenario(scenario_to_text(spec)) == spec

    def test_comments_and_blanks_allowed(self):
        text = "# scenario\nseed = 7\n\nn = 12  # rows\np = 2\nplant = none\n"
        assert parse_scenario(text) == ScenarioSpec(seed=7, n=12, p=2)

    def test_parse_errors(self):
        with pytest.raises(BadSpec):
            parse_scenario("seed = 1\nn = 10\n")  # missing p
        with pytest.raises(BadSpec):
            parse_scenario("seed = 1\nn = 10\np = 2\nplant = bogus\n")
        with pytest.raises(BadSpec):
            parse_scenario("seed = 1\nn = 10\np = 2\nplant = collinear_pair\ncol_a = 0\n")
        with pytest.raises(BadSpec):
            parse_scenario("seed = x\nn = 10\np = 2\n")
        with pytest.raises(BadSpec):
            parse_scenario("seed = 1\nseed = 2\nn = 10\np = 2\n")
        with pytest.raises(BadSpec):
            parse_scenario("seed = 1\nn = 10\np = 2\njunk\n")
