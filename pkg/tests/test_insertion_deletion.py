import numpy as np
import pytest

from camlab.metrics import Curve, evaluate_mask, gaussian_blur, insertion_deletion, selectivity_sweep
from camlab.metrics.insertion_deletion import gaussian_kernel, saliency_order, step_counts


class TestBlur:

    def test_constant_image_is_unchanged(self):
        image = np.full((3, 16, 16), 0.37)
        assert np.allclose(gaussian_blur(image), image, atol=1e-12)

    def test_tiny_sigma_is_identity(self, image):
        assert np.allclose(gaussian_blur(image, 11, sigma=1e-3), image, atol=1e-9)

    def test_kernel_is_normalized(self):
        for size, sigma in [(11, 2.75), (5, 1.0), (3, 0.1)]:
            assert gaussian_kernel(size, sigma).sum() == pytest.approx(1.0, abs=1e-12)

    def test_even_kernel_is_rejected(self):
        with pytest.raises(ValueError):
            gaussian_blur(np.zeros((4, 4)), kernel_size=4)


class TestOrdering:

    def test_uniform_map_uses_raster_order(self):
        assert np.array_equal(saliency_order(np.full((4, 4), 0.5)), np.arange(16))

    def test_descending_with_ties_by_index(self):
        order = saliency_order(np.array([[0.1, 0.9], [0.9, 0.5]]))
        assert order.tolist() == [1, 2, 3, 0]

    def test_step_counts(self):
        assert step_counts(10, 4).tolist() == [0, 3, 5, 8, 10]
        assert step_counts(256, 16).tolist() == list(range(0, 257, 16))


class TestCurves:

    @pytest.mark.parametrize('index', range(20))
    def test_endpoints(self, trained_network, small_dataset, grid, index):
        image = small_dataset.images[index]
        saliency = np.abs(grid((16, 16), index))
        result = insertion_deletion(trained_network, image, saliency, 16)
        c = result.tracked_class
        assert c == int(np.argmax(trained_network.logits(image)))
        full = trained_network.probabilities(image)[c]
        empty = trained_network.probabilities(np.zeros_like(image))[c]
        blurred = trained_network.probabilities(gaussian_blur(image))[c]
        assert result.deletion.probabilities[0] == pytest.approx(full, abs=1e-12)
        assert result.deletion.probabilities[-1] == pytest.approx(empty, abs=1e-12)
        assert result.insertion.probabilities[0] == pytest.approx(blurred, abs=1e-12)
        assert result.insertion.probabilities[-1] == pytest.approx(full, abs=1e-12)
        assert len(result.insertion.probabilities) == len(result.deletion.probabilities) == 17

    @pytest.mark.parametrize('index', range(20))
    def test_order_is_descending_with_ties_by_index(self, small_dataset, index):
        # mapa quantizado para forçar empates
        saliency = np.round(small_dataset.images[index].mean(axis=0) * 4) / 4
        order = saliency_order(saliency)
        values = saliency.ravel()[order]
        assert np.all(np.diff(values) <= 0)
        for value in np.unique(values):
            tied = order[values == value]
            assert np.all(np.diff(tied) > 0)

    def test_shape_and_scores(self, trained_network, image):
        result = insertion_deletion(trained_network, image, np.ones((16, 16)), 8)
        assert len(result.insertion.fractions) == 9
        assert result.deletion.fractions[0] == 0.0 and result.deletion.fractions[-1] == 1.0
        assert 0.0 <= result.insertion_score <= 100.0
        assert 0.0 <= result.deletion_score <= 100.0
        assert result.deletion_score == pytest.approx(np.mean(result.deletion.probabilities) * 100)

    def test_tracks_requested_class(self, trained_network, image):
        assert insertion_deletion(trained_network, image, np.ones((16, 16)), 4,
                                  target_class=1).tracked_class == 1

    def test_steps_out_of_range(self, trained_network, image):
        with pytest.raises(ValueError):
            insertion_deletion(trained_network, image, np.ones((16, 16)), 257)
        with pytest.raises(ValueError):
            insertion_deletion(trained_network, image, np.ones((16, 16)), 1)

    def test_curve_requires_increasing_fractions(self):
        with pytest.raises(ValueError):
            Curve('deletion', np.array([0.0, 0.5, 0.5, 1.0]), np.zeros(4))
        with pytest.raises(ValueError):
            Curve('deletion', np.array([0.1, 1.0]), np.zeros(2))

    def test_to_frame(self, trained_network, image):
        frame = insertion_deletion(trained_network, image, np.ones((16, 16)), 4).deletion.to_frame('x')
        assert list(frame.columns) == ['image_id', 'curve', 'fraction', 'probability']
        assert len(frame) == 5


class TestSelectivity:

    def test_unit_exponent_matches_plain_evaluation(self, trained_network, image, grid):
        saliency = np.abs(grid((16, 16), 3))
        records = dict(selectivity_sweep(trained_network, image, saliency, 0, alphas=(0.5, 1.0)))
        assert records[1.0] == evaluate_mask(trained_network, image, saliency, 0)

    def test_small_exponent_approaches_original(self, trained_network, image, grid):
        saliency = np.abs(grid((16, 16), 4))
        (_, r), = selectivity_sweep(trained_network, image, saliency, 0, alphas=(1e-9,))
        assert r.masked == pytest.approx(r.original, abs=1e-6)

    def test_power_preserves_order(self, grid):
        saliency = np.abs(grid((16, 16), 5))
        for alpha in (0.01, 0.5, 3.0, 10.0):
            assert np.array_equal(saliency_order(saliency ** alpha), saliency_order(saliency))

    def test_alphas_keep_their_order(self, trained_network, image):
        alphas = (2.0, 0.1, 1.0)
        out = selectivity_sweep(trained_network, image, np.ones((16, 16)), 0, alphas)
        assert [alpha for alpha, _ in out] == list(alphas)

    def test_non_positive_alpha(self, trained_network, image):
        with pytest.raises(ValueError):
            selectivity_sweep(trained_network, image, np.ones((16, 16)), 0, (0.0,))
