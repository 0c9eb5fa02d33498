import numpy as np
import pytest

from camlab.autodiff import Tensor
from camlab.loaders import serialize_network
from camlab.nn import build_toy_cnn, randomize_from_layer
from camlab.transformers import grad_cam, opti_cam, OptiConfig


class TestArchitecture:

    def test_hook_shapes(self, untrained_network, image):
        _, features = untrained_network.forward_with_features(image, 'feat')
        assert features.shape == (16, 4, 4)
        _, features = untrained_network.forward_with_features(image, 'block1')
        assert features.shape == (8, 8, 8)

    def test_default_size_hook_shape(self):
        network = build_toy_cnn(3)
        _, features = network.forward_with_features(np.zeros((3, 32, 32)), 'feat')
        assert features.shape == (16, 8, 8)
        assert network.hook_names == ('block1', 'feat')

    def test_same_seed_same_parameters(self):
        assert serialize_network(build_toy_cnn(2, (3, 16, 16), seed=5)) == \
            serialize_network(build_toy_cnn(2, (3, 16, 16), seed=5))

    def test_different_seed_different_parameters(self):
        a = build_toy_cnn(2, (3, 16, 16), seed=5).parameter_arrays()
        b = build_toy_cnn(2, (3, 16, 16), seed=6).parameter_arrays()
        assert not np.array_equal(a['conv1.weight'], b['conv1.weight'])

    def test_rejects_single_class(self):
        with pytest.raises(ValueError):
            build_toy_cnn(1)

    def test_rejects_size_not_multiple_of_four(self):
        with pytest.raises(ValueError):
            build_toy_cnn(2, (3, 18, 18))


class TestForward:

    def test_logits_length(self, trained_network, image):
        assert trained_network.logits(image).shape == (2,)

    def test_features_are_non_negative(self, trained_network, image):
        _, features = trained_network.forward_with_features(image, 'feat')
        assert np.all(features >= 0)

    def test_hooked_forward_matches_plain_forward(self, trained_network, image):
        logits, features = trained_network.forward_with_features(image, 'feat')
        assert np.allclose(logits, trained_network.logits(image), atol=1e-12)
        assert np.allclose(trained_network.head_logits(features, 'feat'), logits, atol=1e-12)

    def test_head_from_first_hook(self, trained_network, image):
        logits, features = trained_network.forward_with_features(image, 'block1')
        assert np.allclose(trained_network.head_logits(features, 'block1'), logits, atol=1e-12)

    def test_zero_image_is_accepted(self, trained_network):
        assert np.all(np.isfinite(trained_network.logits(np.zeros((3, 16, 16)))))

    def test_mean_image_normalizes_to_zero(self, trained_network):
        mean, _ = trained_network.normalization_stats
        mean_image = np.broadcast_to(mean[:, None, None], (3, 16, 16))
        out = trained_network.run(Tensor(mean_image[None]), stop=1).numpy()
        assert np.array_equal(out, np.zeros_like(out))

    def test_probabilities_sum_to_one(self, trained_network, small_dataset):
        probabilities = trained_network.probabilities(small_dataset.images[:4])
        assert np.allclose(probabilities.sum(axis=1), 1.0)

    def test_unknown_layer(self, trained_network, image):
        with pytest.raises(ValueError):
            trained_network.forward_with_features(image, 'conv9')

    def test_layer_that_is_not_a_hook(self, trained_network, image):
        with pytest.raises(ValueError):
            trained_network.forward_with_features(image, 'conv1')

    def test_wrong_image_shape(self, trained_network):
        with pytest.raises(ValueError):
            trained_network.logits(np.zeros((3, 8, 8)))

    def test_inference_does_not_change_parameters(self, trained_network, image):
        before = serialize_network(trained_network)
        grad_cam(trained_network, image, 0, 'feat')
        opti_cam(trained_network, image, 0, 'feat', OptiConfig(max_iterations=3))
        assert serialize_network(trained_network) == before


class TestRandomization:

    def test_stage_zero_is_identical(self, trained_network):
        assert serialize_network(randomize_from_layer(trained_network, 0, 1)) == \
            serialize_network(trained_network)

    def test_full_randomization_changes_every_learnable_tensor(self, trained_network):
        original = trained_network.parameter_arrays()
        randomized = randomize_from_layer(trained_network, 3, 1).parameter_arrays()
        for layer in trained_network.learnable_layers:
            for key in layer.parameters:
                name = f"{layer.name}.{key}"
                assert not np.array_equal(original[name], randomized[name]), name

    def test_consecutive_stages_differ_only_in_the_added_layer(self, trained_network):
        one = randomize_from_layer(trained_network, 1, 1).parameter_arrays()
        two = randomize_from_layer(trained_network, 2, 1).parameter_arrays()
        for name in one:
            if name.startswith('conv2.'):
                assert not np.array_equal(one[name], two[name]), name
            else:
                assert np.array_equal(one[name], two[name]), name

    def test_same_seed_does_not_restore_the_initial_weights(self):
        initial = build_toy_cnn(2, (3, 16, 16), seed=42)
        randomized = randomize_from_layer(initial, 3, 42).parameter_arrays()
        for name, value in initial.parameter_arrays().items():
            if name.startswith(('conv1.', 'conv2.', 'fc.')):
                assert not np.array_equal(value, randomized[name]), name

    def test_randomization_is_seeded(self, trained_network):
        first = randomize_from_layer(trained_network, 2, 5)
        assert serialize_network(first) == serialize_network(randomize_from_layer(trained_network, 2, 5))
        assert serialize_network(first) != serialize_network(randomize_from_layer(trained_network, 2, 6))

    def test_stage_out_of_range(self, trained_network):
        with pytest.raises(ValueError):
            randomize_from_layer(trained_network, 4, 1)
        with pytest.raises(ValueError):
            randomize_from_layer(trained_network, -1, 1)
