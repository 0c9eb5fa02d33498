"""
Especificação de camadas da rede.

Este módulo contém a classe LayerSpec e a função que aplica uma camada a um
Tensor usando as operações de camlab.autodiff.
"""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

import numpy as np

from camlab.autodiff import Tensor, ops

LAYER_KINDS = ('input_normalize', 'conv2d', 'relu', 'max_pool2d', 'global_average_pool', 'linear')
LEARNABLE_KINDS = ('conv2d', 'linear')


def _frozen(array) -> np.ndarray:
    frozen = np.array(array, dtype=np.float64)
    frozen.flags.writeable = False
    return frozen


@dataclass(frozen=True)
class LayerSpec:
    """
    Uma camada da rede.

    Attributes:
        name (str): Nome único na rede
        kind (str): Tipo da camada (ver LAYER_KINDS)
        parameters (Mapping[str, np.ndarray]): Tensores da camada (somente leitura)
        hookable (bool): Se a saída pode ser usada como pilha de mapas A^k
    """

    name: str
    kind: str
    parameters: Mapping[str, np.ndarray] = field(default_factory=dict)
    hookable: bool = False

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"Tipo de camada desconhecido: {self.kind}")
        object.__setattr__(self, 'parameters',
                           {key: _frozen(value) for key, value in self.parameters.items()})

    @property
    def learnable(self) -> bool:
        return self.kind in LEARNABLE_KINDS

    def with_parameters(self, parameters: Mapping[str, np.ndarray]) -> 'LayerSpec':
        """Retorna uma cópia da camada com novos tensores."""
        return LayerSpec(name=self.name, kind=self.kind, parameters=dict(parameters),
                         hookable=self.hookable)


def apply_layer(layer: LayerSpec, x: Tensor,
                trainable: Optional[Dict[str, Tensor]] = None) -> Tensor:
    """
    Aplica uma camada a um lote (N, ...).

    Args:
        layer (LayerSpec): Camada
        x (Tensor): Entrada
        trainable (Dict[str, Tensor], optional): Parâmetros como variáveis de um
            grafo, indexados por "camada.parametro"; ausentes viram constantes

    Returns:
        Tensor: Saída da camada
    """
    def param(key: str) -> Tensor:
        qualified = f"{layer.name}.{key}"
        if trainable is not None and qualified in trainable:
            return trainable[qualified]
        return Tensor(layer.parameters[key])

    if layer.kind == 'input_normalize':
        mean = layer.parameters['mean'].reshape(1, -1, 1, 1)
        inv_std = 1.0 / layer.parameters['std'].reshape(1, -1, 1, 1)
        return ops.mul(ops.sub(x, mean), inv_std)
    if layer.kind == 'conv2d':
        return ops.conv2d(x, param('weight'), param('bias'))
    if layer.kind == 'relu':
        return ops.relu(x)
    if layer.kind == 'max_pool2d':
        return ops.max_pool2d(x)
    if layer.kind == 'global_average_pool':
        return ops.global_average_pool(x)
    return ops.linear(x, param('weight'), param('bias'))
