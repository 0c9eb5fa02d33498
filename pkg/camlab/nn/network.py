"""
Rede classificadora f com pontos de captura de mapas de ativação.

Este módulo contém a classe Network, imutável durante a inferência. Ela
expõe o passo direto completo, o passo dividido no ponto de captura
(imagem -> A^k e A^k -> logits) e acesso ordenado aos parâmetros.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import structlog

from camlab.autodiff import Tensor, ops

from .layers import LayerSpec, apply_layer

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class Network:
    """
    Lista ordenada de camadas com número de classes e forma de entrada.

    Attributes:
        layers (Tuple[LayerSpec, ...]): Camadas em ordem de execução
        class_count (int): Número de classes C
        input_shape (Tuple[int, int, int]): (canais, H, W)
    """

    layers: Tuple[LayerSpec, ...]
    class_count: int
    input_shape: Tuple[int, int, int]

    def __post_init__(self):
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ValueError(f"Nomes de camadas repetidos: {names}")
        object.__setattr__(self, 'layers', tuple(self.layers))
        object.__setattr__(self, 'input_shape', tuple(int(v) for v in self.input_shape))

    # Estrutura

    @property
    def hook_names(self) -> Tuple[str, ...]:
        return tuple(layer.name for layer in self.layers if layer.hookable)

    @property
    def normalization_stats(self) -> Tuple[np.ndarray, np.ndarray]:
        """Média e desvio padrão por canal usados pela camada input_normalize."""
        layer = self.layer('input_normalize')
        return layer.parameters['mean'], layer.parameters['std']

    @property
    def learnable_layers(self) -> Tuple[LayerSpec, ...]:
        return tuple(layer for layer in self.layers if layer.learnable)

    def layer_index(self, name: str) -> int:
        for index, layer in enumerate(self.layers):
            if layer.name == name:
                return index
        raise ValueError(f"Camada desconhecida: {name}")

    def layer(self, name: str) -> LayerSpec:
        return self.layers[self.layer_index(name)]

    def hook_index(self, name: str) -> int:
        index = self.layer_index(name)
        if not self.layers[index].hookable:
            raise ValueError(f"Camada {name} não é um ponto de captura; disponíveis: {self.hook_names}")
        return index

    def parameter_arrays(self) -> Dict[str, np.ndarray]:
        """Todos os tensores da rede, indexados por "camada.parametro", em ordem."""
        arrays = {}
        for layer in self.layers:
            for key, value in layer.parameters.items():
                arrays[f"{layer.name}.{key}"] = value
        return arrays

    def with_parameters(self, arrays: Dict[str, np.ndarray]) -> 'Network':
        """
        Retorna uma nova rede com os tensores informados substituídos.

        Raises:
            ValueError: Se um nome não existir ou a forma divergir
        """
        current = self.parameter_arrays()
        for name, value in arrays.items():
            if name not in current:
                raise ValueError(f"Parâmetro desconhecido: {name}")
            if np.shape(value) != current[name].shape:
                raise ValueError(
                    f"Forma divergente para {name}: {np.shape(value)} != {current[name].shape}")

        layers = []
        for layer in self.layers:
            params = {key: arrays.get(f"{layer.name}.{key}", value)
                      for key, value in layer.parameters.items()}
            layers.append(layer.with_parameters(params))
        return Network(layers=tuple(layers), class_count=self.class_count,
                       input_shape=self.input_shape)

    # Execução

    def _as_batch(self, images) -> np.ndarray:
        batch = np.asarray(images, dtype=np.float64)
        if batch.ndim == 3:
            batch = batch[None]
        if batch.ndim != 4 or batch.shape[1:] != self.input_shape:
            raise ValueError(f"Imagem de forma {np.shape(images)} incompatível com {self.input_shape}")
        return batch

    def run(self, x: Tensor, start: int = 0, stop: Optional[int] = None,
            trainable: Optional[Dict[str, Tensor]] = None) -> Tensor:
        """
        Executa as camadas [start, stop) sobre um lote.

        Args:
            x (Tensor): Entrada em lote
            start (int): Primeira camada
            stop (int, optional): Camada final (exclusiva)
            trainable (Dict[str, Tensor], optional): Parâmetros como variáveis

        Returns:
            Tensor: Saída da última camada executada
        """
        for layer in self.layers[start:stop]:
            x = apply_layer(layer, x, trainable)
        return x

    def logits(self, images) -> np.ndarray:
        """
        Passo direto completo do classificador.

        Args:
            images: Imagem (C, H, W) ou lote (N, C, H, W) com valores em [0,1]

        Returns:
            np.ndarray: Logits (C,) ou (N, C)
        """
        single = np.ndim(images) == 3
        out = self.run(Tensor(self._as_batch(images))).numpy()
        return out[0] if single else out

    def probabilities(self, images) -> np.ndarray:
        logits = self.logits(images)
        return ops.softmax(logits).numpy()

    def predict(self, images) -> np.ndarray:
        return np.argmax(self.logits(images), axis=-1)

    def forward_with_features(self, image, layer: str) -> Tuple[np.ndarray, np.ndarray]:
        """
        Passo direto que também devolve os mapas de ativação no ponto de captura.

        Args:
            image: Imagem (C, H, W) com valores em [0,1]
            layer (str): Nome do ponto de captura

        Returns:
            Tuple[np.ndarray, np.ndarray]: Logits (C,) e mapas (K, h, w)
        """
        index = self.hook_index(layer)
        batch = self._as_batch(image)
        if batch.shape[0] != 1:
            raise ValueError("forward_with_features: espera uma única imagem")
        features = self.run(Tensor(batch), stop=index + 1)
        logits = self.run(features, start=index + 1)
        return logits.numpy()[0], features.numpy()[0]

    def head(self, features: Tensor, layer: str) -> Tensor:
        """Executa as camadas posteriores ao ponto de captura sobre (N, K, h, w)."""
        return self.run(features, start=self.hook_index(layer) + 1)

    def head_logits(self, features, layer: str) -> np.ndarray:
        """
        Logits a partir de mapas de ativação já calculados.

        Args:
            features: Mapas (K, h, w) ou lote (N, K, h, w)
            layer (str): Ponto de captura de onde os mapas vieram

        Returns:
            np.ndarray: Logits (C,) ou (N, C)
        """
        single = np.ndim(features) == 3
        batch = np.asarray(features, dtype=np.float64)
        if single:
            batch = batch[None]
        out = self.head(Tensor(batch), layer).numpy()
        return out[0] if single else out
