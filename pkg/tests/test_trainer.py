from dataclasses import replace

import numpy as np
import pytest

from camlab.extractors import generate_synthetic_dataset
from camlab.loaders import serialize_network
from camlab.nn import TrainConfig, Trainer, build_toy_cnn


class TestTrainer:

    def test_zero_epochs_keeps_learnable_parameters(self, small_dataset, untrained_network):
        trained, _ = Trainer(TrainConfig(epochs=0)).fit(untrained_network, small_dataset)
        before = untrained_network.parameter_arrays()
        after = trained.parameter_arrays()
        for layer in untrained_network.learnable_layers:
            for key in layer.parameters:
                name = f"{layer.name}.{key}"
                assert np.array_equal(before[name], after[name])

    def test_normalization_stats_come_from_train_split(self, small_dataset, untrained_network):
        trained, _ = Trainer(TrainConfig(epochs=0)).fit(untrained_network, small_dataset)
        mean, _ = trained.normalization_stats
        expected = small_dataset.images[small_dataset.indices('train')].mean(axis=(0, 2, 3))
        assert np.allclose(mean, expected)

    def test_training_is_deterministic(self, small_dataset, untrained_network):
        config = TrainConfig(epochs=2, batch_size=4, seed=11)
        first, accuracy_a = Trainer(config).fit(untrained_network, small_dataset)
        second, accuracy_b = Trainer(config).fit(untrained_network, small_dataset)
        assert serialize_network(first) == serialize_network(second)
        assert accuracy_a == accuracy_b

    def test_history_has_one_loss_per_epoch(self, small_dataset, untrained_network):
        trainer = Trainer(TrainConfig(epochs=3, batch_size=4))
        trainer.fit(untrained_network, small_dataset)
        assert list(trainer.history['epoch']) == [1, 2, 3]
        assert np.all(np.isfinite(trainer.history['loss']))

    def test_training_changes_parameters(self, small_dataset, untrained_network, trained_network):
        assert serialize_network(trained_network) != serialize_network(untrained_network)

    def test_empty_train_split(self, small_dataset, untrained_network):
        only_test = replace(small_dataset, splits=np.full(len(small_dataset), 'test'))
        with pytest.raises(ValueError):
            Trainer(TrainConfig(epochs=1)).fit(untrained_network, only_test)

    def test_label_out_of_range(self, small_dataset, untrained_network):
        bad = replace(small_dataset, labels=np.full(len(small_dataset), 5))
        with pytest.raises(ValueError):
            Trainer(TrainConfig(epochs=1)).fit(untrained_network, bad)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            TrainConfig(epochs=-1)
        with pytest.raises(ValueError):
            TrainConfig(batch_size=0)
        with pytest.raises(ValueError):
            TrainConfig(learning_rate=0.0)


@pytest.mark.slow
def test_reference_configuration_reaches_ninety_percent():
    dataset = generate_synthetic_dataset(seed=42, n_per_class=300, image_size=32, class_count=3)
    network = build_toy_cnn(3, dataset.input_shape, seed=42)
    trained, accuracy = Trainer(TrainConfig(epochs=20, seed=42)).fit(network, dataset)
    test_index = dataset.indices('test')
    assert accuracy >= 0.9
    assert Trainer.evaluate(trained, dataset.images[test_index], dataset.labels[test_index]) >= 0.9
