import json
import random

import pytest

from numguard.geometry.predicates import OrientationSign, orient_exact
from numguard.geometry.search import (
    OrientSearchConfig,
    counterexample_from_dict,
    gen_near_coplanar,
    gen_near_coplanar_cloud,
    replay_counterexample,
    report_to_json,
    search_disagreement,
)


class TestConfig:
    def test_rejects_bad_width(self):
        with pytest.raises(ValueError):
            OrientSearchConfig(seed=0, float_width=16)

    def test_rejects_inverted_band(self):
        with pytest.raises(ValueError):
            OrientSearchConfig(seed=0, e_min=4, e_max=2)

    def test_rejects_band_outside_width_limits(self):
        with pytest.raises(ValueError):
            OrientSearchConfig(seed=0, float_width=32, e_max=120)

    def test_rejects_zero_radius(self):
        with pytest.raises(ValueError):
            OrientSearchConfig(seed=0, ulp_radius=0)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            OrientSearchConfig(seed=0, mode="plurality")


class TestGenerator:
    def test_emitted_quadruple_matches_recorded_exact_sign(self):
        rng = random.Random(0)
        config = OrientSearchConfig(seed=0, ulp_radius=3)
        for _ in range(300):
            a, b, c, d, exact_sign = gen_near_coplanar(config, rng)
            assert exact_sign is not OrientationSign.COPLANAR
            assert orient_exact(a, b, c, d) is exact_sign

    def test_both_signs_occur_over_ten_thousand_samples(self):
        rng = random.Random(1)
        config = OrientSearchConfig(seed=0)
        signs = [gen_near_coplanar(config, rng)[4] for _ in range(10_000)]
        assert signs.count(OrientationSign.ABOVE) > 0
        assert signs.count(OrientationSign.BELOW) > 0

    def test_width32_coordinates_are_binary32_exact(self):
        import numpy as np

        rng = random.Random(2)
        config = OrientSearchConfig(seed=0, float_width=32)
        for _ in range(100):
            points = gen_near_coplanar(config, rng)[:4]
            for p in points:
                for coord in p.as_tuple():
                    assert float(np.float32(coord)) == coord

    def test_exponent_band_respected(self):
        rng = random.Random(3)
        config = OrientSearchConfig(seed=0, e_min=10, e_max=12)
        a, b, c, _, _ = gen_near_coplanar(config, rng)
        magnitudes = [abs(v) for p in (a, b, c) for v in p.as_tuple() if v != 0.0]
        # Lattice mantissas reach 2**20, so coordinates sit in
        # [2**e_min, 2**(e_max + 21)).
        assert min(magnitudes) >= 2.0**10
        assert max(magnitudes) < 2.0 ** (12 + 21)


class TestSearch:
    def test_single_base_mode_finds_quickly(self):
        report = search_disagreement(OrientSearchConfig(seed=4, iterations=500))
        assert report.stats.samples == 500
        assert report.stats.found_total >= 1
        assert report.counterexamples
        # Every base position errs somewhere in the stream, including the
        # first-base evaluation.
        assert all(err >= 1 for err in report.stats.base_errors)

    def test_every_record_replays_bit_exactly(self):
        report = search_disagreement(OrientSearchConfig(seed=5, iterations=400))
        assert all(replay_counterexample(c) for c in report.counterexamples)

    def test_single_base_records_have_an_erring_base(self):
        report = search_disagreement(OrientSearchConfig(seed=6, iterations=300))
        for cex in report.counterexamples:
            assert any(s is not cex.exact_sign for s in cex.per_base)

    def test_majority_records_have_a_wrong_vote(self):
        report = search_disagreement(
            OrientSearchConfig(seed=6, iterations=2000, mode="majority")
        )
        assert report.counterexamples, "majority disagreements expected at this rate"
        for cex in report.counterexamples:
            assert cex.majority_sign is not cex.exact_sign

    def test_monotone_statistics(self):
        for seed in (7, 8, 9):
            for width in (64, 32):
                stats = search_disagreement(
                    OrientSearchConfig(seed=seed, iterations=800, float_width=width)
                ).stats
                assert stats.majority_err <= stats.two_base_err <= stats.one_base_err

    def test_deterministic_given_seed(self):
        config = OrientSearchConfig(seed=10, iterations=600)
        first = search_disagreement(config)
        second = search_disagreement(config)
        assert report_to_json(first) == report_to_json(second)

    def test_worker_partition_merges_identically(self):
        config = OrientSearchConfig(seed=11, iterations=2200)
        solo = search_disagreement(config, jobs=1)
        forked = search_disagreement(config, jobs=2)
        assert report_to_json(solo) == report_to_json(forked)

    def test_max_records_caps_list_not_count(self):
        config = OrientSearchConfig(seed=12, iterations=600, max_records=3)
        report = search_disagreement(config)
        assert len(report.counterexamples) == 3
        assert report.stats.found_total > 3

    def test_report_round_trips_through_json(self):
        config = OrientSearchConfig(seed=13, iterations=300)
        report = search_disagreement(config)
        doc = json.loads(report_to_json(report))
        assert doc["config"] == config.to_dict()
        rebuilt = [counterexample_from_dict(c) for c in doc["counterexamples"]]
        assert all(replay_counterexample(c) for c in rebuilt)

    def test_width32_search_runs(self):
        report = search_disagreement(
            OrientSearchConfig(seed=14, iterations=400, float_width=32)
        )
        assert report.stats.samples == 400
        for cex in report.counterexamples[:20]:
            assert replay_counterexample(cex)


class TestAdversarialCloud:
    def test_cloud_shape(self):
        rng = random.Random(20)
        config = OrientSearchConfig(seed=0)
        cloud = gen_near_coplanar_cloud(config, rng, near_points=10)
        # 3 corners + 10 near-plane points + 2 anchors.
        assert len(cloud) == 15

    def test_cloud_is_exactly_representable(self):
        rng = random.Random(21)
        config = OrientSearchConfig(seed=0)
        cloud = gen_near_coplanar_cloud(config, rng, near_points=6)
        for p in cloud:
            for coord in p.as_tuple():
                assert coord == float.fromhex(coord.hex())

    def test_fixture_regenerates_from_recorded_config(self, fixtures_dir):
        from numguard.geometry.search import find_hull_breakage_cloud

        doc = json.loads((fixtures_dir / "hull_breakage.json").read_text())
        config = OrientSearchConfig(**doc["config"])
        result = find_hull_breakage_cloud(config, attempts=doc["attempts"])
        assert result is not None
        cloud, _, attempts = result
        assert attempts == doc["attempts"]
        assert [list(p.hex_coords()) for p in cloud] == doc["points"]
