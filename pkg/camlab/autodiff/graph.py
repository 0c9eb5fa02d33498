"""
Fita de operações para diferenciação automática em modo reverso.

Cada Graph registra nós em ordem topológica (as entradas de um nó sempre o
precedem). O passo reverso percorre a fita de trás para frente a partir de
uma raiz escalar e acumula os gradientes de todos os nós alcançáveis.

Um Graph pertence a um único worker; nunca é compartilhado.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import structlog

from .tensor import Tensor

logger = structlog.get_logger(__name__)

BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


@dataclass
class Node:
    """Registro de uma operação: tipo, ids das entradas e tensor de saída."""

    op: str
    inputs: Tuple[Optional[int], ...]
    output: Tensor
    backward: Optional[BackwardFn] = None


class Graph:
    """
    Registro topologicamente ordenado de operações e seus gradientes.

    Variáveis (folhas diferenciáveis) são criadas com `variable`; tensores sem
    grafo são tratados como constantes pelas operações.
    """

    def __init__(self):
        """Inicializa um grafo vazio."""
        self.nodes = []
        self.gradients: Dict[int, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self.nodes)

    def variable(self, data) -> Tensor:
        """
        Cria uma folha diferenciável no grafo.

        Args:
            data: Valores iniciais

        Returns:
            Tensor: Tensor ligado a este grafo
        """
        tensor = Tensor(data, graph=self, node_id=len(self.nodes))
        self.nodes.append(Node(op='variable', inputs=(), output=tensor))
        return tensor

    def record(self, op: str, inputs: Sequence[Tensor], data: np.ndarray,
               backward: BackwardFn) -> Tensor:
        """
        Registra uma operação cujas entradas já estão na fita.

        Args:
            op (str): Nome da operação
            inputs (Sequence[Tensor]): Entradas (constantes recebem id None)
            data (np.ndarray): Resultado do passo direto
            backward (BackwardFn): Função que mapeia o gradiente da saída nos
                gradientes das entradas, na mesma ordem

        Returns:
            Tensor: Tensor de saída ligado a este grafo
        """
        input_ids = []
        for tensor in inputs:
            if tensor.graph is None:
                input_ids.append(None)
            elif tensor.graph is self:
                input_ids.append(tensor.node_id)
            else:
                raise ValueError(f"{op}: entradas pertencem a grafos diferentes")

        output = Tensor(data, graph=self, node_id=len(self.nodes))
        self.nodes.append(Node(op=op, inputs=tuple(input_ids), output=output, backward=backward))
        return output

    def backward(self, root: Tensor) -> Dict[int, np.ndarray]:
        """
        Executa o passo reverso a partir de uma raiz escalar.

        Args:
            root (Tensor): Tensor escalar produzido neste grafo

        Returns:
            Dict[int, np.ndarray]: Gradiente de cada nó alcançável a partir da raiz

        Raises:
            ValueError: Se a raiz não for escalar ou não pertencer ao grafo
        """
        if root.graph is not self:
            raise ValueError("backward: a raiz não pertence a este grafo")
        if root.size != 1:
            raise ValueError(f"backward: raiz não escalar de forma {root.shape}")

        gradients = {root.node_id: np.ones_like(root.data)}

        # Nós em ordem topológica inversa
        for node_id in range(root.node_id, -1, -1):
            upstream = gradients.get(node_id)
            node = self.nodes[node_id]
            if upstream is None or node.backward is None:
                continue

            input_grads = node.backward(upstream)
            for input_id, grad in zip(node.inputs, input_grads):
                if input_id is None or grad is None:
                    continue
                # Acumula quando a entrada é usada mais de uma vez
                if input_id in gradients:
                    gradients[input_id] = gradients[input_id] + grad
                else:
                    gradients[input_id] = grad

        self.gradients = gradients
        return gradients

    def grad(self, tensor: Tensor) -> np.ndarray:
        """
        Retorna o gradiente acumulado de um tensor do grafo.

        Nós não alcançáveis a partir da última raiz têm gradiente nulo.
        """
        if tensor.graph is not self:
            raise ValueError("grad: tensor não pertence a este grafo")
        grad = self.gradients.get(tensor.node_id)
        if grad is None:
            return np.zeros_like(tensor.data)
        return grad
