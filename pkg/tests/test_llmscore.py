import random

import pytest

from scindex.errors import (
    EmptyScores,
    EmptyYear,
    InsufficientData,
    OutOfDomain,
    ZeroFieldMean,
)
from scindex.llmscore import (
    RepeatedScores,
    ScoreBand,
    ScoreScale,
    calibrate_scale,
    field_normalize,
    lookup_convert,
    mean_score,
    year_normalize,
)


class TestMeanScore:
    def test_plain_mean(self):
        assert mean_score(RepeatedScores("A1", (2, 3, 3, 4, 3))) == 3.0

    def test_single_score_low_confidence(self):
        rs = RepeatedScores("A1", (3.0,))
        assert mean_score(rs) == 3.0
        assert rs.low_confidence

    def test_two_scores(self):
        assert mean_score(RepeatedScores("A1", (1, 4))) == 2.5

    def test_five_repetitions_confident(self):
        assert not RepeatedScores("A1", (3,) * 5).low_confidence
        assert RepeatedScores("A1", (3,) * 4).low_confidence

    def test_empty(self):
        with pytest.raises(EmptyScores):
            mean_score(RepeatedScores("A1", ()))


class TestYearNormalize:
    def test_hand_derived_offsets(self):
        adjusted, offsets = year_normalize(
            {2020: [3.2, 2.8], 2021: [2.4, 2.8]}  # means 3.0 and 2.6
        )
        assert offsets[2020] == pytest.approx(-0.2)
        assert offsets[2021] == pytest.approx(0.2)
        assert adjusted[2020][0] == pytest.approx(3.0)  # a 3.2 score shifts to 3.0
        # a 3.0 score in the 3.0-mean year lands on 2.8
        adjusted2, _ = year_normalize({2020: [3.0, 3.0], 2021: [2.6, 2.6]})
        assert adjusted2[2020][0] == pytest.approx(2.8)

    def test_single_year_unchanged(self):
        adjusted, offsets = year_normalize({2020: [3.0, 2.0]})
        assert offsets == {2020: 0.0}
        assert adjusted[2020] == [3.0, 2.0]

    def test_equal_means_zero_offsets(self):
        _, offsets = year_normalize({2020: [2.0, 4.0], 2021: [3.0, 3.0]})
        assert all(abs(v) < 1e-12 for v in offsets.values())

    def test_postcondition_year_means_equal_grand(self):
        rng = random.Random(3)
        grouped = {
            year: [rng.uniform(1, 4) for _ in range(rng.randint(1, 9))]
            for year in range(2015, 2022)
        }
        flat = [s for group in grouped.values() for s in group]
        grand = sum(flat) / len(flat)
        adjusted, _ = year_normalize(grouped)
        for scores in adjusted.values():
            assert sum(scores) / len(scores) == pytest.approx(grand, abs=1e-10)

    def test_preserves_within_year_order(self):
        adjusted, _ = year_normalize({2020: [3.0, 1.0, 2.0], 2021: [4.0]})
        values = adjusted[2020]
        assert values[0] > values[2] > values[1]

    def test_empty_year(self):
        with pytest.raises(EmptyYear):
            year_normalize({2020: []})
        with pytest.raises(EmptyYear):
            year_normalize({})


class TestFieldNormalize:
    def test_ratio(self):
        assert field_normalize(3.0, 2.5) == pytest.approx(1.2)

    def test_field_average_maps_to_one(self):
        assert field_normalize(2.5, 2.5) == 1.0

    def test_per_field_mean_of_normalized_is_one(self):
        rng = random.Random(5)
        scores = [rng.uniform(1, 4) for _ in range(50)]
        mean = sum(scores) / len(scores)
        normalized = [field_normalize(s, mean) for s in scores]
        assert sum(normalized) / len(normalized) == pytest.approx(1.0, abs=1e-12)

    def test_preserves_order(self):
        assert field_normalize(3.0, 2.0) > field_normalize(2.9, 2.0)

    def test_zero_mean(self):
        with pytest.raises(ZeroFieldMean):
            field_normalize(3.0, 0.0)


class TestLookupConvert:
    def test_shipped_table_values(self):
        scale = ScoreScale.load_default()
        assert lookup_convert(2.72, scale) == 2
        assert lookup_convert(4.0, scale) == 4
        assert lookup_convert(2.50, scale) == 1  # upper bound inclusive
        assert lookup_convert(2.51, scale) == 2
        assert lookup_convert(2.81, scale) == 3
        assert lookup_convert(3.04, scale) == 4
        assert lookup_convert(1.0, scale) == 1

    def test_between_printed_endpoints_falls_lower(self):
        scale = ScoreScale.load_default()
        assert lookup_convert(2.505, scale) == 1
        assert lookup_convert(2.805, scale) == 2

    def test_monotone_over_grid(self):
        scale = ScoreScale.load_default()
        previous = 0
        for i in range(0, 301):
            value = 1.0 + i * 0.01
            label = lookup_convert(value, scale)
            assert label >= previous
            previous = label

    def test_out_of_domain(self):
        scale = ScoreScale.load_default()
        for value in (0.5, 4.2):
            with pytest.raises(OutOfDomain):
                lookup_convert(value, scale)

    def test_scale_validation(self):
        with pytest.raises(ValueError):
            ScoreScale(bands=(), domain=(1, 4))
        with pytest.raises(ValueError):
            ScoreScale(
                bands=(ScoreBand(2.0, 2), ScoreBand(4.0, 1)), domain=(1, 4)
            )
        with pytest.raises(ValueError):
            ScoreScale(
                bands=(ScoreBand(2.0, 1), ScoreBand(3.0, 2)), domain=(1, 4)
            )

    def test_round_trip_json(self, tmp_path):
        scale = ScoreScale.load_default()
        path = tmp_path / "scale.json"
        import json

        path.write_text(json.dumps(scale.to_dict()))
        again = ScoreScale.from_json(path)
        assert again == scale


class TestCalibrateScale:
    def test_perfectly_separated(self):
        samples = (
            [(1.5, 1), (2.0, 1)]
            + [(2.6, 2), (2.7, 2)]
            + [(2.9, 3), (3.0, 3)]
            + [(3.5, 4), (3.9, 4)]
        )
        scale = calibrate_scale(samples, band_count=4, domain=(1.0, 4.0))
        assert [b.label for b in scale.bands] == [1, 2, 3, 4]
        assert scale.bands[0].upper == pytest.approx(2.0, abs=1e-9)
        assert scale.bands[1].upper == pytest.approx(2.7, abs=1e-9)
        assert scale.bands[2].upper == pytest.approx(3.0, abs=1e-9)
        for value, label in samples:
            assert scale.lookup(value) == label

    def test_round_trip_recovers_shipped_boundaries(self):
        table = ScoreScale.load_default()
        rng = random.Random(11)
        samples = []
        for i, band in enumerate(table.bands):
            lower = table.band_lower(i)
            for _ in range(200):
                # sample on the 0.01 grid inside the printed band
                steps = int(round((band.upper - lower) / 0.01))
                value = round(lower + 0.01 * rng.randint(0, steps), 9)
                samples.append((value, band.label))
        scale = calibrate_scale(samples, band_count=4, domain=(1.0, 4.0))
        for fitted, reference in zip(scale.bands, table.bands):
            assert abs(fitted.upper - reference.upper) <= 0.01 + 1e-9
            assert fitted.label == reference.label

    def test_single_label_insufficient(self):
        with pytest.raises(InsufficientData):
            calibrate_scale([(2.0, 3), (2.5, 3)], band_count=2)

    def test_monotone_boundaries(self):
        rng = random.Random(7)
        samples = [(rng.uniform(1, 4), rng.randint(1, 4)) for _ in range(100)]
        scale = calibrate_scale(samples, band_count=4, domain=(1.0, 4.0))
        uppers = [b.upper for b in scale.bands]
        assert uppers == sorted(uppers)
