"""
Treino da CNN de brinquedo com SGD e momentum.

Este módulo contém a classe Trainer que é responsável por:
- Calcular as estatísticas de normalização da partição de treino
- Minimizar a entropia cruzada com SGD + momentum em mini-lotes
- Medir a acurácia na partição reservada
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
import structlog

from camlab.autodiff import Graph, SGDMomentum, Tensor, ops

from .network import Network

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Hiperparâmetros do treino."""

    epochs: int = 20
    batch_size: int = 16
    learning_rate: float = 0.05
    momentum: float = 0.9
    seed: int = 42

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError(f"epochs deve ser >= 0, recebido {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size deve ser positivo, recebido {self.batch_size}")
        if self.learning_rate <= 0 or self.momentum <= 0:
            raise ValueError("learning_rate e momentum devem ser positivos")


class Trainer:
    """
    Classe para treinar a rede a partir de um SyntheticDataset.
    """

    def __init__(self, config: TrainConfig = None):
        """
        Inicializa o treinador.

        Args:
            config (TrainConfig): Hiperparâmetros
        """
        self.config = config or TrainConfig()
        self._losses = []

    @property
    def history(self) -> pd.DataFrame:
        """Perda média por época (colunas epoch, loss)."""
        return pd.DataFrame({'epoch': range(1, len(self._losses) + 1), 'loss': self._losses})

    def fit(self, network: Network, dataset) -> Tuple[Network, float]:
        """
        Treina a rede e devolve (rede treinada, acurácia reservada).

        Args:
            network (Network): Rede inicial
            dataset (SyntheticDataset): Dados com partições train/val/test

        Returns:
            Tuple[Network, float]: Rede treinada e acurácia em val (ou test)

        Raises:
            ValueError: Se o conjunto de treino estiver vazio ou os rótulos forem inválidos
        """
        try:
            train_index = dataset.indices('train')
            if len(train_index) == 0:
                raise ValueError("Conjunto de treino vazio")
            labels = np.asarray(dataset.labels)
            if labels.min() < 0 or labels.max() >= network.class_count:
                raise ValueError(f"Rótulos fora de [0, {network.class_count})")

            images = dataset.images[train_index]
            train_labels = labels[train_index]
            logger.info("Iniciando treino", train_images=len(train_index),
                        epochs=self.config.epochs, batch_size=self.config.batch_size)

            network = self._with_normalization_stats(network, images)
            network = self._optimize(network, images, train_labels)

            # Acurácia em val; sem val usa test, e por fim o próprio treino
            held_out = dataset.indices('val')
            if len(held_out) == 0:
                held_out = dataset.indices('test')
            if len(held_out) == 0:
                held_out = train_index
            accuracy = self.evaluate(network, dataset.images[held_out], labels[held_out])

            logger.info("Treino concluído", accuracy=accuracy, held_out_images=len(held_out))
            return network, accuracy

        except Exception as e:
            logger.error("Erro durante o treino", error=str(e))
            raise

    def _with_normalization_stats(self, network: Network, images: np.ndarray) -> Network:
        mean = images.mean(axis=(0, 2, 3))
        std = images.std(axis=(0, 2, 3))
        # canal constante: mantém a escala original
        std = np.where(std > 0, std, 1.0)
        logger.info("Estatísticas de normalização calculadas", mean=mean.tolist(), std=std.tolist())
        return network.with_parameters({'input_normalize.mean': mean, 'input_normalize.std': std})

    def _optimize(self, network: Network, images: np.ndarray, labels: np.ndarray) -> Network:
        rng = np.random.default_rng(self.config.seed)
        optimizer = SGDMomentum(self.config.learning_rate, self.config.momentum)
        names = [f"{layer.name}.{key}" for layer in network.learnable_layers
                 for key in layer.parameters]
        params = {name: np.array(network.parameter_arrays()[name]) for name in names}

        # Uma permutação por época a partir do mesmo gerador
        for epoch in range(self.config.epochs):
            order = rng.permutation(len(images))
            losses = []
            for start in range(0, len(order), self.config.batch_size):
                batch = order[start:start + self.config.batch_size]
                graph = Graph()
                variables = {name: graph.variable(value) for name, value in params.items()}
                logits = network.run(Tensor(images[batch]), trainable=variables)
                loss = ops.cross_entropy(logits, labels[batch])
                graph.backward(loss)
                # Gradientes de cada parâmetro e passo do SGD
                grads = {name: graph.grad(variable) for name, variable in variables.items()}
                params = optimizer.step(params, grads)
                losses.append(loss.item())

            self._losses.append(float(np.mean(losses)))
            logger.debug("Época concluída", epoch=epoch + 1, loss=self._losses[-1])

        return network.with_parameters(params)

    @staticmethod
    def evaluate(network: Network, images: np.ndarray, labels: np.ndarray) -> float:
        """Acurácia de classificação em um lote de imagens."""
        if len(images) == 0:
            raise ValueError("Nenhuma imagem para avaliar")
        predictions = network.predict(images)
        return float(np.mean(predictions == np.asarray(labels)))


def train(network: Network, dataset, config: TrainConfig = None) -> Tuple[Network, float]:
    """Atalho para Trainer(config).fit(network, dataset)."""
    return Trainer(config).fit(network, dataset)
