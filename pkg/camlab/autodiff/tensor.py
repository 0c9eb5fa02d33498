"""
Tensor denso de ponto flutuante de 64 bits.

Este módulo contém a classe Tensor, que é o portador universal de valores
do camlab: imagens, mapas de ativação, logits e pesos de canais. Um Tensor
pode pertencer a um Graph (quando participa de um cálculo diferenciável) ou
ser uma constante sem grafo.
"""

from typing import Optional, Tuple

import numpy as np


class Tensor:
    """
    Array n-dimensional float64 com referência opcional ao grafo que o produziu.

    O array interno é somente leitura: operações sempre produzem novos tensores.
    """

    __slots__ = ('data', 'graph', 'node_id')

    def __init__(self, data, graph=None, node_id: Optional[int] = None):
        """
        Inicializa o tensor.

        Args:
            data: Valores (qualquer coisa conversível para np.ndarray)
            graph (Graph, optional): Grafo dono do nó que produziu o tensor
            node_id (int, optional): Índice do nó no grafo
        """
        array = np.array(data, dtype=np.float64)
        array.flags.writeable = False
        self.data = array
        self.graph = graph
        self.node_id = node_id

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def requires_grad(self) -> bool:
        return self.graph is not None

    def numpy(self) -> np.ndarray:
        """Retorna uma cópia gravável dos valores."""
        return self.data.copy()

    def item(self) -> float:
        if self.data.size != 1:
            raise ValueError(f"item: tensor não escalar de forma {self.shape}")
        return float(self.data.reshape(-1)[0])

    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    def __radd__(self, other):
        from . import ops
        return ops.add(other, self)

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        if np.isscalar(other):
            return ops.mul_scalar(self, float(other))
        return ops.mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        from . import ops
        return ops.mul_scalar(self, -1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def __repr__(self):
        origin = f"node={self.node_id}" if self.graph is not None else "const"
        return f"Tensor(shape={self.shape}, {origin})"
