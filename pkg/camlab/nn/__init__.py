"""
Módulo da rede classificadora do camlab.

Este módulo contém:
- LayerSpec e Network: rede imutável com pontos de captura
- build_toy_cnn e randomize_from_layer: arquitetura fixa e reinicialização
- Trainer, TrainConfig e train: treino com SGD + momentum
"""

from .layers import LayerSpec
from .network import Network
from .architecture import DEFAULT_LAYER, build_toy_cnn, randomize_from_layer
from .trainer import TrainConfig, Trainer, train

__all__ = ['LayerSpec', 'Network', 'DEFAULT_LAYER', 'build_toy_cnn', 'randomize_from_layer',
           'TrainConfig', 'Trainer', 'train']
