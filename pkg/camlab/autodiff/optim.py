"""
Otimizadores de primeira ordem sobre arrays numpy.

- Adam: usado pelo Opti-CAM (subida de gradiente no vetor u)
- SGDMomentum: usado pelo treino da CNN de brinquedo
"""

from typing import Dict

import numpy as np


class Adam:
    """
    Adam com correção de viés.

    Com `maximize=True` o passo segue o gradiente (subida), que é o caso do
    objetivo do Opti-CAM.
    """

    def __init__(self, learning_rate: float = 0.1, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8, maximize: bool = False):
        """
        Inicializa o otimizador.

        Args:
            learning_rate (float): Taxa de aprendizado
            beta1 (float): Decaimento do primeiro momento
            beta2 (float): Decaimento do segundo momento
            epsilon (float): Termo de estabilidade do denominador
            maximize (bool): Se True, sobe o gradiente
        """
        if learning_rate <= 0:
            raise ValueError(f"Adam: taxa de aprendizado deve ser positiva, recebido {learning_rate}")
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.maximize = maximize
        self.step_count = 0
        self._first = None
        self._second = None

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """
        Aplica um passo e retorna os novos parâmetros (a entrada não é alterada).

        Args:
            params (np.ndarray): Parâmetros atuais
            grad (np.ndarray): Gradiente do objetivo em `params`

        Returns:
            np.ndarray: Parâmetros atualizados
        """
        if self._first is None:
            self._first = np.zeros_like(params)
            self._second = np.zeros_like(params)

        self.step_count += 1
        self._first = self.beta1 * self._first + (1.0 - self.beta1) * grad
        self._second = self.beta2 * self._second + (1.0 - self.beta2) * grad * grad
        # Correção de viés dos momentos
        first_hat = self._first / (1.0 - self.beta1 ** self.step_count)
        second_hat = self._second / (1.0 - self.beta2 ** self.step_count)
        update = self.learning_rate * first_hat / (np.sqrt(second_hat) + self.epsilon)

        return params + update if self.maximize else params - update


class SGDMomentum:
    """SGD com momentum (v = μ·v + g; p = p - lr·v) sobre um dicionário de parâmetros."""

    def __init__(self, learning_rate: float, momentum: float = 0.9):
        if learning_rate <= 0:
            raise ValueError(f"SGD: taxa de aprendizado deve ser positiva, recebido {learning_rate}")
        self.learning_rate = learning_rate
        self.momentum = momentum
        self._velocity: Dict[str, np.ndarray] = {}

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        """
        Atualiza cada parâmetro com o seu gradiente.

        Args:
            params (Dict[str, np.ndarray]): Parâmetros por nome
            grads (Dict[str, np.ndarray]): Gradientes por nome

        Returns:
            Dict[str, np.ndarray]: Novos parâmetros
        """
        updated = {}
        for name, value in params.items():
            velocity = self._velocity.get(name)
            if velocity is None:
                velocity = np.zeros_like(value)
            velocity = self.momentum * velocity + grads[name]
            self._velocity[name] = velocity
            updated[name] = value - self.learning_rate * velocity
        return updated
