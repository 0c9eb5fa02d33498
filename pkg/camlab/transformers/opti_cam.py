"""
Opti-CAM: otimização dos pesos de canais por subida de gradiente.

O mapa é S(u) = Σ_k softmax(u)_k A^k, adaptado para a resolução da imagem
e usado como máscara. O vetor u é ajustado com Adam para maximizar o
objetivo configurado sobre a imagem mascarada. O resultado é sempre o
melhor u observado ao longo das iterações.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import pandas as pd
import structlog

from camlab.autodiff import Adam, Graph, Tensor, ops
from camlab.nn import Network

from .cam_methods import SaliencyMap, check_class, grad_cam
from .masking import Normalization, adapt_saliency, adapt_tensor, mask_tensor

logger = structlog.get_logger(__name__)


class Objective(str, Enum):
    """Função objetivo F maximizada sobre u."""

    MASK = 'mask'
    DIFF = 'diff'
    IOMASK = 'iomask'
    IODIFF = 'iodiff'


class Selector(str, Enum):
    """Função g_c aplicada ao vetor de logits."""

    LOGIT = 'logit'
    PROBABILITY = 'probability'


class Init(str, Enum):
    """Inicialização do vetor u."""

    ZEROS = 'zeros'
    GRADCAM = 'gradcam'
    RANDOM = 'random'


@dataclass(frozen=True)
class OptiConfig:
    """
    Parâmetros do Opti-CAM.

    Attributes:
        objective (Objective): Mask, Diff, IOMask ou IODiff
        normalization (Normalization): Range, Max ou Sigmoid
        selector (Selector): Logit ou Probability
        learning_rate (float): Taxa do Adam
        max_iterations (int): Limite de iterações
        tolerance (float): Parada quando |F_t - F_{t-1}| < tolerance
        init (Init): Inicialização de u
        adam_beta1 (float): β1 do Adam
        adam_beta2 (float): β2 do Adam
        adam_epsilon (float): ε do Adam
        seed (int): Semente da inicialização aleatória
    """

    objective: Objective = Objective.MASK
    normalization: Normalization = Normalization.RANGE
    selector: Selector = Selector.LOGIT
    learning_rate: float = 0.1
    max_iterations: int = 100
    tolerance: float = 1e-10
    init: Init = Init.ZEROS
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'objective', Objective(self.objective))
        object.__setattr__(self, 'normalization', Normalization(self.normalization))
        object.__setattr__(self, 'selector', Selector(self.selector))
        object.__setattr__(self, 'init', Init(self.init))
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate deve ser > 0, recebido {self.learning_rate}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations deve ser >= 1, recebido {self.max_iterations}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance deve ser >= 0, recebido {self.tolerance}")

    def as_dict(self) -> dict:
        return {
            'objective': self.objective.value,
            'normalization': self.normalization.value,
            'selector': self.selector.value,
            'learning_rate': self.learning_rate,
            'max_iterations': self.max_iterations,
            'tolerance': self.tolerance,
            'init': self.init.value,
            'adam_beta1': self.adam_beta1,
            'adam_beta2': self.adam_beta2,
            'adam_epsilon': self.adam_epsilon,
            'seed': self.seed,
        }


class ObjectiveFunction:
    """
    Avalia F(u) e ∂F/∂u para uma imagem, classe e ponto de captura fixos.
    """

    def __init__(self, network: Network, image: np.ndarray, target_class: int,
                 layer: str, config: OptiConfig):
        """
        Inicializa o avaliador, calculando os mapas A^k e o escore original.

        Raises:
            ValueError: Se o ponto de captura tiver menos de 2 canais
        """
        check_class(network, target_class)
        self.network = network
        self.image = np.asarray(image, dtype=np.float64)
        self.target_class = target_class
        self.layer = layer
        self.config = config

        # Mapas A^k do ponto de captura e escore da imagem original
        logits, features = network.forward_with_features(self.image, layer)
        if features.shape[0] < 2:
            raise ValueError(f"opti_cam: o ponto de captura {layer} tem {features.shape[0]} canal(is); exige >= 2")
        self.features = features
        self.channels = features.shape[0]
        self.feature_shape = features.shape[1:]
        self._flat_features = features.reshape(self.channels, -1)
        self.original_score = self._score(Tensor(logits[None])).item()

    def _score(self, logits: Tensor) -> Tensor:
        if self.config.selector is Selector.LOGIT:
            return ops.pick(logits, (0, self.target_class))
        return ops.pick(ops.softmax(logits), (0, self.target_class))

    def saliency(self, weights: Tensor) -> Tensor:
        """S = Σ_k w_k A^k na resolução do ponto de captura."""
        combined = ops.matmul(ops.reshape(weights, (1, self.channels)), self._flat_features)
        return ops.reshape(combined, self.feature_shape)

    def _masked_score(self, mask: Tensor) -> Tensor:
        return self._score(self.network.run(mask_tensor(self.image, mask)))

    def objective(self, u: Tensor) -> Tensor:
        """F(u) como tensor escalar (diferenciável quando u pertence a um grafo)."""
        # Pesos no simplex via softmax; a máscara volta à resolução da imagem
        mask = adapt_tensor(self.saliency(ops.softmax(u)), self.image.shape[1:],
                            self.config.normalization)
        inside = self._masked_score(mask)
        objective = self.config.objective

        if objective is Objective.MASK:
            return inside
        if objective is Objective.DIFF:
            return ops.mul_scalar(ops.abs(ops.sub(self.original_score, inside)), -1.0)

        # Variantes io também avaliam o complemento 1 - máscara
        outside = self._masked_score(ops.add_scalar(ops.mul_scalar(mask, -1.0), 1.0))
        if objective is Objective.IOMASK:
            return ops.sub(inside, outside)
        return ops.sub(ops.abs(ops.sub(self.original_score, outside)),
                       ops.abs(ops.sub(self.original_score, inside)))

    def value(self, u: np.ndarray) -> float:
        return self.objective(Tensor(u)).item()

    def value_and_grad(self, u: np.ndarray) -> Tuple[float, np.ndarray]:
        graph = Graph()
        variable = graph.variable(u)
        result = self.objective(variable)
        graph.backward(result)
        return result.item(), graph.grad(variable)

    def raw_map(self, u: np.ndarray) -> np.ndarray:
        return self.saliency(ops.softmax(u)).numpy()


def initial_weights(network: Network, image: np.ndarray, target_class: int, layer: str,
                    config: OptiConfig, channels: int) -> np.ndarray:
    """
    Vetor u inicial.

    - zeros: pesos uniformes 1/K
    - gradcam: log dos pesos positivos do Grad-CAM normalizados (zeros se nenhum for positivo)
    - random: normal com escala 0.01 a partir de config.seed
    """
    if config.init is Init.ZEROS:
        return np.zeros(channels)
    if config.init is Init.RANDOM:
        return np.random.default_rng(config.seed).normal(0.0, 0.01, size=channels)

    # Pesos positivos do Grad-CAM, normalizados, levados ao espaço do softmax
    weights = np.maximum(grad_cam(network, image, target_class, layer).channel_weights, 0.0)
    total = weights.sum()
    if total == 0:
        return np.zeros(channels)
    return np.log(weights / total + 1e-12)


def opti_cam(network: Network, image: np.ndarray, target_class: int, layer: str,
             config: Optional[OptiConfig] = None) -> Tuple[SaliencyMap, pd.DataFrame]:
    """
    Calcula o mapa Opti-CAM.

    Args:
        network (Network): Classificador
        image (np.ndarray): Imagem (C, H, W) em [0,1]
        target_class (int): Classe c
        layer (str): Ponto de captura
        config (OptiConfig, optional): Parâmetros; padrão OptiConfig()

    Returns:
        Tuple[SaliencyMap, pd.DataFrame]: Mapa do melhor u e o traço (iteration, objective)

    Raises:
        ValueError: Se a classe for inválida ou o ponto de captura tiver menos de 2 canais
        FloatingPointError: Se F ou seu gradiente deixarem de ser finitos
    """
    config = config or OptiConfig()
    function = ObjectiveFunction(network, image, target_class, layer, config)
    u = initial_weights(network, function.image, target_class, layer, config, function.channels)

    # Subida de gradiente com Adam sobre u
    optimizer = Adam(config.learning_rate, config.adam_beta1, config.adam_beta2,
                     config.adam_epsilon, maximize=True)
    trace = []
    best_u, best_value = u, -np.inf
    previous = None

    for iteration in range(config.max_iterations):
        value, grad = function.value_and_grad(u)
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            raise FloatingPointError(
                f"opti_cam: objetivo não finito na iteração {iteration} (F={value})")
        trace.append((iteration, value))
        # Guarda o melhor iterado; empates mantêm o mais antigo
        if value > best_value:
            best_u, best_value = u, value
        # Para quando F estabiliza
        if previous is not None and abs(value - previous) < config.tolerance:
            break
        previous = value
        u = optimizer.step(u, grad)

    logger.debug("Opti-CAM concluído", target_class=target_class, iterations=len(trace),
                 best_objective=best_value)

    # O mapa final vem do melhor u, não do último
    raw = function.raw_map(best_u)
    adapted = adapt_saliency(raw, function.image.shape[1:], config.normalization)
    saliency = SaliencyMap(raw=raw, adapted=adapted, method='opti-cam', target_class=target_class,
                           channel_weights=ops.softmax(best_u).numpy())
    return saliency, pd.DataFrame(trace, columns=['iteration', 'objective'])


def linear_combination_objective(network: Network, image: np.ndarray, target_class: int,
                                 layer: str, weights: np.ndarray) -> float:
    """
    F(w) = f(x ⊙ n(up(Σ_k w_k A^k)))_c com pesos livres (sem softmax) e normalização Range.

    Com w = 0 o mapa é constante e n(0) = 0, logo a máscara é nula.
    """
    check_class(network, target_class)
    image = np.asarray(image, dtype=np.float64)
    _, features = network.forward_with_features(image, layer)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (features.shape[0],):
        raise ValueError(f"linear_combination_objective: esperados {features.shape[0]} pesos, recebido {weights.shape}")
    # Pesos livres, sem softmax
    mask = adapt_saliency(np.tensordot(weights, features, axes=1), image.shape[1:],
                          Normalization.RANGE)
    return float(network.logits(image * mask[None])[target_class])
