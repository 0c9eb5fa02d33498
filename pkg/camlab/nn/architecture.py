"""
Arquitetura fixa da CNN de brinquedo e reinicialização progressiva.

input_normalize -> conv1(3->8) -> relu1 -> block1 (pool) -> conv2(8->16)
-> relu2 -> feat (pool) -> gap -> fc(16->C)

Pontos de captura: "block1" (8 x H/2 x W/2) e "feat" (16 x H/4 x W/4, padrão).
"""

from typing import Dict, Tuple

import numpy as np
import structlog

from .layers import LayerSpec
from .network import Network

logger = structlog.get_logger(__name__)

DEFAULT_LAYER = 'feat'
KERNEL_SIZE = 3

# Chave extra do fluxo de reinicialização, independente do fluxo de construção
RANDOMIZE_STREAM = 1


def _glorot_bound(shape: Tuple[int, ...]) -> float:
    if len(shape) == 4:
        receptive = shape[2] * shape[3]
        fan_in, fan_out = shape[1] * receptive, shape[0] * receptive
    else:
        fan_in, fan_out = shape[1], shape[0]
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def _init_layer(layer: LayerSpec, seed: int, position: int, *stream: int) -> Dict[str, np.ndarray]:
    # Um fluxo por (semente, posição, ...): a mesma camada recebe sempre os mesmos valores
    rng = np.random.default_rng([seed, position, *stream])
    weight_shape = layer.parameters['weight'].shape
    bound = _glorot_bound(weight_shape)
    return {
        'weight': rng.uniform(-bound, bound, size=weight_shape),
        'bias': rng.uniform(-bound, bound, size=layer.parameters['bias'].shape),
    }


def build_toy_cnn(class_count: int, input_shape: Tuple[int, int, int] = (3, 32, 32),
                  seed: int = 42) -> Network:
    """
    Constrói a CNN de brinquedo com pesos determinísticos.

    Args:
        class_count (int): Número de classes (>= 2)
        input_shape (Tuple[int, int, int]): (canais, H, W), H e W múltiplos de 4
        seed (int): Semente da inicialização

    Returns:
        Network: Rede inicializada

    Raises:
        ValueError: Se class_count < 2 ou a forma for inválida
    """
    if class_count < 2:
        raise ValueError(f"class_count deve ser >= 2, recebido {class_count}")
    if len(input_shape) != 3 or min(input_shape) < 1:
        raise ValueError(f"Forma de entrada inválida: {input_shape}")
    channels, height, width = (int(v) for v in input_shape)
    if height % 4 or width % 4:
        raise ValueError(f"H e W devem ser múltiplos de 4, recebido {input_shape}")

    k = KERNEL_SIZE
    layers = [
        LayerSpec('input_normalize', 'input_normalize',
                  {'mean': np.zeros(channels), 'std': np.ones(channels)}),
        LayerSpec('conv1', 'conv2d', {'weight': np.zeros((8, channels, k, k)), 'bias': np.zeros(8)}),
        LayerSpec('relu1', 'relu'),
        LayerSpec('block1', 'max_pool2d', hookable=True),
        LayerSpec('conv2', 'conv2d', {'weight': np.zeros((16, 8, k, k)), 'bias': np.zeros(16)}),
        LayerSpec('relu2', 'relu'),
        LayerSpec(DEFAULT_LAYER, 'max_pool2d', hookable=True),
        LayerSpec('gap', 'global_average_pool'),
        LayerSpec('fc', 'linear', {'weight': np.zeros((class_count, 16)), 'bias': np.zeros(class_count)}),
    ]
    layers = [
        layer.with_parameters(_init_layer(layer, seed, position)) if layer.learnable else layer
        for position, layer in enumerate(layers)
    ]

    network = Network(layers=tuple(layers), class_count=class_count,
                      input_shape=(channels, height, width))
    logger.info("CNN de brinquedo construída", class_count=class_count,
                input_shape=network.input_shape, seed=seed)
    return network


def randomize_from_layer(network: Network, stage: int, seed: int) -> Network:
    """
    Reinicializa as últimas `stage` camadas com parâmetros aprendíveis.

    A contagem começa pela saída (stage 1 = fc). stage 0 devolve uma cópia
    idêntica.

    Args:
        network (Network): Rede treinada
        stage (int): Número de camadas reinicializadas, 0 <= stage <= total
        seed (int): Semente da reinicialização

    Returns:
        Network: Nova rede

    Raises:
        ValueError: Se stage estiver fora do intervalo
    """
    positions = [i for i, layer in enumerate(network.layers) if layer.learnable]
    if not 0 <= stage <= len(positions):
        raise ValueError(f"stage deve estar em [0, {len(positions)}], recebido {stage}")

    arrays = {}
    for position in positions[len(positions) - stage:]:
        layer = network.layers[position]
        for key, value in _init_layer(layer, seed, position, RANDOMIZE_STREAM).items():
            arrays[f"{layer.name}.{key}"] = value

    logger.info("Camadas reinicializadas", stage=stage,
                layers=sorted({name.split('.')[0] for name in arrays}))
    return network.with_parameters(arrays)
