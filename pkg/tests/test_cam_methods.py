import numpy as np
import pytest

from camlab.nn import Network
from camlab.transformers import (METHODS, SaliencyExplainer, ablation_cam, cam, compute_saliency,
                                 fake_cam, grad_cam, grad_cam_pp, score_cam, xgrad_cam)
from camlab.transformers.cam_methods import (feature_gradient, gradcam_pp_alpha, score_cam_scores,
                                             xgrad_weights)
from camlab.transformers.opti_cam import linear_combination_objective

GRADIENT_METHODS = (grad_cam, grad_cam_pp, xgrad_cam)


def zeroed_row(network, target_class):
    weight = np.array(network.parameter_arrays()['fc.weight'])
    weight[target_class] = 0.0
    return network.with_parameters({'fc.weight': weight})


def count_rows(monkeypatch, attribute):
    """Instrumenta um método da Network e devolve a lista de tamanhos de lote recebidos."""
    calls = []
    original = getattr(Network, attribute)

    def counted(self, batch, *args, **kwargs):
        calls.append(1 if np.ndim(batch) == 3 else len(batch))
        return original(self, batch, *args, **kwargs)

    monkeypatch.setattr(Network, attribute, counted)
    return calls


class TestCam:

    def test_matches_grad_cam_at_last_layer(self, trained_network, small_dataset):
        for image in small_dataset.images[:4]:
            for c in range(2):
                a = cam(trained_network, image, c, 'feat').adapted
                b = grad_cam(trained_network, image, c, 'feat').adapted
                assert np.allclose(a, b, atol=1e-10)

    def test_zero_classifier_row(self, trained_network, image):
        network = zeroed_row(trained_network, 1)
        assert np.array_equal(cam(network, image, 1, 'feat').raw, np.zeros((4, 4)))

    def test_rejects_intermediate_layer(self, trained_network, image):
        with pytest.raises(ValueError):
            cam(trained_network, image, 0, 'block1')


class TestGradientMethods:

    def test_zero_classifier_row(self, trained_network, image):
        network = zeroed_row(trained_network, 0)
        for method in GRADIENT_METHODS:
            saliency = method(network, image, 0, 'feat')
            assert np.array_equal(saliency.raw, np.zeros((4, 4))), saliency.method
            assert np.array_equal(saliency.adapted, np.zeros((16, 16))), saliency.method

    def test_feature_gradient_matches_finite_differences(self, trained_network, image):
        _, features = trained_network.forward_with_features(image, 'feat')
        grads, _ = feature_gradient(trained_network, features, 1, 'feat')
        eps = 1e-6
        numeric = np.zeros_like(features)
        for index in np.ndindex(features.shape):
            plus, minus = features.copy(), features.copy()
            plus[index] += eps
            minus[index] -= eps
            numeric[index] = (trained_network.head_logits(plus, 'feat')[1]
                              - trained_network.head_logits(minus, 'feat')[1]) / (2 * eps)
        assert np.allclose(grads, numeric, atol=1e-7)

    def test_gradcam_pp_alpha_matches_loop(self, grid):
        features = np.abs(grid((3, 2, 2), 1))
        grads = grid((3, 2, 2), 2)
        alpha = gradcam_pp_alpha(features, grads)
        for k in range(3):
            total = features[k].sum()
            for i in range(2):
                for j in range(2):
                    g = grads[k, i, j]
                    expected = g ** 2 / (2 * g ** 2 + total * g ** 3)
                    assert alpha[k, i, j] == pytest.approx(expected, rel=1e-12)

    def test_gradcam_pp_alpha_single_position(self):
        features = np.array([[[1.0, 2.0], [0.5, 0.5]]])
        grads = np.zeros((1, 2, 2))
        grads[0, 1, 0] = 0.3
        alpha = gradcam_pp_alpha(features, grads)
        assert alpha[0, 1, 0] == pytest.approx(1.0 / (2.0 + 4.0 * 0.3), rel=1e-12)
        assert alpha[0, 0, 0] == 0.0

    def test_xgrad_weights_match_loop(self, grid):
        features = np.abs(grid((3, 2, 2), 3))
        grads = grid((3, 2, 2), 4)
        weights = xgrad_weights(features, grads)
        for k in range(3):
            expected = sum(features[k, i, j] / features[k].sum() * grads[k, i, j]
                           for i in range(2) for j in range(2))
            assert weights[k] == pytest.approx(expected, rel=1e-12)

    def test_xgrad_dead_channel(self, grid):
        features = np.abs(grid((2, 2, 2), 5))
        features[1] = 0.0
        assert xgrad_weights(features, grid((2, 2, 2), 6))[1] == 0.0

    def test_xgrad_uniform_channel_reduces_to_mean_gradient(self, grid):
        features = np.full((2, 3, 3), 0.4)
        grads = grid((2, 3, 3), 7)
        assert np.allclose(xgrad_weights(features, grads), grads.mean(axis=(1, 2)), atol=1e-12)


class TestScoreCam:

    def test_weights_on_simplex(self, trained_network, image):
        weights = score_cam(trained_network, image, 0, 'feat').channel_weights
        assert weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(weights > 0)

    def test_scores_match_linear_combination_objective(self, trained_network, small_dataset):
        for image in small_dataset.images[:10]:
            scores, features = score_cam_scores(trained_network, image, 1, 'feat')
            baseline = linear_combination_objective(trained_network, image, 1, 'feat',
                                                    np.zeros(len(features)))
            for k in range(len(features)):
                unit = np.zeros(len(features))
                unit[k] = 1.0
                value = linear_combination_objective(trained_network, image, 1, 'feat', unit)
                assert scores[k] == pytest.approx(value - baseline, abs=1e-10)

    def test_identical_channels_give_uniform_weights(self, identical_channel_network, image):
        weights = score_cam(identical_channel_network, image, 0, 'feat').channel_weights
        assert np.allclose(weights, 1.0 / 16, atol=1e-12)

    def test_classifier_passes(self, trained_network, image, monkeypatch):
        calls = count_rows(monkeypatch, 'logits')
        score_cam(trained_network, image, 0, 'feat')
        assert sum(calls) == 17


class TestAblationCam:

    def test_matches_one_channel_at_a_time(self, trained_network, image):
        saliency = ablation_cam(trained_network, image, 0, 'feat')
        _, features = trained_network.forward_with_features(image, 'feat')
        score = trained_network.head_logits(features, 'feat')[0]
        for k in range(len(features)):
            ablated = features.copy()
            ablated[k] = 0.0
            drop = score - trained_network.head_logits(ablated, 'feat')[0]
            expected = drop / score if score != 0 else drop
            assert saliency.channel_weights[k] == pytest.approx(expected, abs=1e-10)

    def test_dead_channel_has_zero_weight(self, trained_network, image):
        params = trained_network.parameter_arrays()
        weight = np.array(params['conv2.weight'])
        bias = np.array(params['conv2.bias'])
        weight[0] = 0.0
        bias[0] = -1.0
        network = trained_network.with_parameters({'conv2.weight': weight, 'conv2.bias': bias})
        assert ablation_cam(network, image, 0, 'feat').channel_weights[0] == 0.0

    def test_head_passes(self, trained_network, image, monkeypatch):
        calls = count_rows(monkeypatch, 'head_logits')
        ablation_cam(trained_network, image, 0, 'feat')
        assert sum(calls) == 17


class TestFakeCam:

    def test_single_zero_pixel(self):
        adapted = fake_cam((32, 32)).adapted
        assert adapted.sum() == 1023
        assert adapted[0, 0] == 0.0

    def test_accepts_image_shape(self):
        assert fake_cam((3, 16, 16)).adapted.shape == (16, 16)


class TestExplainer:

    @pytest.mark.parametrize('method', METHODS)
    def test_every_method_gives_valid_maps(self, trained_network, image, method):
        saliency = compute_saliency(trained_network, image, 1, method)
        assert saliency.method == method
        assert saliency.adapted.shape == (16, 16)
        assert np.all(saliency.raw >= 0)
        assert saliency.adapted.min() >= 0.0 and saliency.adapted.max() <= 1.0

    def test_first_hook_is_supported(self, trained_network, image):
        saliency = compute_saliency(trained_network, image, 0, 'grad-cam', layer='block1')
        assert saliency.raw.shape == (8, 8)

    def test_trace_is_kept_for_opti_cam(self, trained_network, image):
        explainer = SaliencyExplainer(trained_network, 'opti-cam')
        explainer.explain(image, 0)
        assert list(explainer.last_trace.columns) == ['iteration', 'objective']

    def test_unknown_method(self, trained_network):
        with pytest.raises(ValueError):
            SaliencyExplainer(trained_network, 'lime')

    def test_unknown_class(self, trained_network, image):
        with pytest.raises(ValueError):
            grad_cam(trained_network, image, 2, 'feat')
