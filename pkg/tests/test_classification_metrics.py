import numpy as np
import pytest

from camlab.metrics import (EvalRecord, average_drop, average_gain, average_increase,
                            classification_summary, evaluate_mask)


def record(original, masked, image_id=''):
    return EvalRecord(image_id=image_id, target_class=0, original=original, masked=masked)


FIXTURE = [record(0.8, 0.6), record(0.5, 0.7), record(0.3, 0.3), record(0.9, 0.95), record(0.2, 0.05)]


class TestAverages:

    def test_average_drop(self):
        assert average_drop([record(0.8, 0.6)]) == pytest.approx(25.0)
        assert average_drop([record(0.5, 0.7)]) == 0.0
        assert average_drop([record(0.8, 0.6), record(0.5, 0.7)]) == pytest.approx(12.5)

    def test_average_gain(self):
        assert average_gain([record(0.5, 0.75)]) == pytest.approx(50.0)
        assert average_gain([record(0.9, 0.4)]) == 0.0

    def test_average_increase(self):
        assert average_increase([record(0.5, 0.7), record(0.8, 0.6)]) == 50.0
        assert average_increase([record(0.4, 0.4), record(0.7, 0.7)]) == 0.0

    def test_straight_loop_oracle(self):
        drop = gain = increase = 0.0
        for r in FIXTURE:
            p, o = r.original, r.masked
            if p > o:
                drop += (p - o) / p
            if o > p:
                gain += (o - p) / (1 - p)
                increase += 1
        n = len(FIXTURE)
        summary = classification_summary(FIXTURE)
        assert summary['AD'] == pytest.approx(drop / n * 100, abs=1e-12)
        assert summary['AG'] == pytest.approx(gain / n * 100, abs=1e-12)
        assert summary['AI'] == pytest.approx(increase / n * 100, abs=1e-12)

    def test_drop_and_gain_are_exclusive(self):
        for r in FIXTURE:
            assert r.drop * r.gain == 0.0

    def test_gain_implies_increase(self):
        for r in FIXTURE:
            if r.gain > 0:
                assert r.increased

    @pytest.mark.parametrize('metric', [average_drop, average_gain, average_increase])
    def test_empty_records(self, metric):
        with pytest.raises(ValueError):
            metric([])

    def test_ranges(self):
        summary = classification_summary(FIXTURE)
        assert all(0.0 <= value <= 100.0 for value in summary.values())


class TestEvaluateMask:

    def test_ones_mask_keeps_probability(self, trained_network, image):
        r = evaluate_mask(trained_network, image, np.ones((16, 16)), 1, 'img')
        assert r.original == r.masked
        assert r.drop == 0.0 and r.gain == 0.0 and not r.increased

    def test_predicted_class(self, trained_network, image):
        r = evaluate_mask(trained_network, image, np.zeros((16, 16)), 0)
        probabilities = trained_network.probabilities(image)
        assert r.predicted_class == int(np.argmax(probabilities))
        assert r.predicted_probability == pytest.approx(probabilities.max())
        assert r.masked == pytest.approx(trained_network.probabilities(np.zeros_like(image))[0])

    def test_as_dict(self):
        assert record(0.8, 0.6, 'a').as_dict()['image_id'] == 'a'
