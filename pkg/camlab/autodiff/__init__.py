"""
Módulo de diferenciação automática do camlab.

Este módulo contém:
- Tensor: array float64 com metadados de forma
- Graph: fita de operações para o passo reverso
- ops: conjunto fechado de operações diferenciáveis
- optim: otimizadores Adam e SGD com momentum
"""

from .tensor import Tensor
from .graph import Graph, Node
from . import ops
from .optim import Adam, SGDMomentum

__all__ = ['Tensor', 'Graph', 'Node', 'ops', 'Adam', 'SGDMomentum']
