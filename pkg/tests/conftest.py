"""
Fixtures compartilhadas: conjunto sintético pequeno, redes de brinquedo e
artefatos gravados em diretórios temporários.
"""

import numpy as np
import pytest

from camlab.extractors import generate_synthetic_dataset
from camlab.loaders import save_weights, write_dataset
from camlab.nn import TrainConfig, Trainer, build_toy_cnn

SMALL_SIZE = 16


def permuted_grid(shape, seed=0):
    """Valores distintos (k + 0.5)/n·2 - 1 em ordem aleatória, longe de 0 e sem empates."""
    count = int(np.prod(shape))
    order = np.random.default_rng(seed).permutation(count)
    return ((order + 0.5) / count * 2.0 - 1.0).reshape(shape)


@pytest.fixture
def grid():
    return permuted_grid


@pytest.fixture(scope='session')
def small_dataset():
    return generate_synthetic_dataset(seed=7, n_per_class=10, image_size=SMALL_SIZE, class_count=2)


@pytest.fixture(scope='session')
def untrained_network():
    return build_toy_cnn(2, (3, SMALL_SIZE, SMALL_SIZE), seed=42)


@pytest.fixture(scope='session')
def trained_network(small_dataset, untrained_network):
    network, _ = Trainer(TrainConfig(epochs=5, batch_size=4, seed=3)).fit(untrained_network, small_dataset)
    return network


@pytest.fixture(scope='session')
def image(small_dataset):
    return small_dataset.images[0]


@pytest.fixture(scope='session')
def dataset_dir(tmp_path_factory, small_dataset):
    directory = tmp_path_factory.mktemp('data')
    write_dataset(small_dataset, str(directory))
    return directory


@pytest.fixture(scope='session')
def weights_path(tmp_path_factory, trained_network):
    path = tmp_path_factory.mktemp('weights') / 'toy.ocw'
    save_weights(trained_network, str(path))
    return path


@pytest.fixture
def identical_channel_network(untrained_network):
    """Rede cujos 16 canais de "feat" são idênticos."""
    params = untrained_network.parameter_arrays()
    return untrained_network.with_parameters({
        'conv2.weight': np.repeat(params['conv2.weight'][:1], 16, axis=0),
        'conv2.bias': np.full(16, abs(params['conv2.bias'][0])),
    })
