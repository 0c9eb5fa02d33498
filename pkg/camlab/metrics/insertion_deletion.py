"""
Curvas de inserção e deleção e varredura de seletividade.

Os pixels são ordenados pela saliência adaptada (decrescente, empates em
ordem de varredura). Na deleção eles são zerados progressivamente; na
inserção são copiados da imagem original sobre uma versão borrada.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import structlog
from scipy.ndimage import convolve1d

from .classification import EvalRecord, evaluate_mask

logger = structlog.get_logger(__name__)

DEFAULT_ALPHAS = (0.01, 0.05, 0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0)
BLUR_KERNEL_SIZE = 11


@dataclass(frozen=True)
class Curve:
    """Pares (fração de pixels, probabilidade) com frações estritamente crescentes de 0 a 1."""

    name: str
    fractions: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        fractions = np.asarray(self.fractions, dtype=np.float64)
        if fractions.shape != np.shape(self.probabilities) or fractions.ndim != 1:
            raise ValueError("Curve: frações e probabilidades com formas diferentes")
        if fractions[0] != 0.0 or fractions[-1] != 1.0 or np.any(np.diff(fractions) <= 0):
            raise ValueError("Curve: frações devem crescer estritamente de 0 a 1")

    @property
    def score(self) -> float:
        """Média das probabilidades por passo × 100."""
        return float(np.mean(self.probabilities) * 100.0)

    def to_frame(self, image_id: str = '') -> pd.DataFrame:
        return pd.DataFrame({
            'image_id': image_id,
            'curve': self.name,
            'fraction': self.fractions,
            'probability': self.probabilities,
        })


@dataclass(frozen=True)
class InsertionDeletionResult:
    insertion: Curve
    deletion: Curve
    tracked_class: int

    @property
    def insertion_score(self) -> float:
        return self.insertion.score

    @property
    def deletion_score(self) -> float:
        return self.deletion.score


def gaussian_kernel(kernel_size: int, sigma: float) -> np.ndarray:
    """Núcleo gaussiano 1D normalizado; sigma <= 0 devolve o delta."""
    if kernel_size < 1 or kernel_size % 2 == 0:
        raise ValueError(f"gaussian_kernel: tamanho deve ser ímpar e positivo, recebido {kernel_size}")
    radius = kernel_size // 2
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    if sigma <= 0:
        return (offsets == 0).astype(np.float64)
    kernel = np.exp(-offsets ** 2 / (2.0 * sigma ** 2))
    return kernel / kernel.sum()


def gaussian_blur(image: np.ndarray, kernel_size: int = BLUR_KERNEL_SIZE,
                  sigma: Optional[float] = None) -> np.ndarray:
    """
    Borrão gaussiano separável com reflexão nas bordas.

    Args:
        image (np.ndarray): Imagem (C, H, W) ou (H, W)
        kernel_size (int): Tamanho ímpar do núcleo
        sigma (float, optional): Desvio padrão; padrão kernel_size / 4

    Returns:
        np.ndarray: Imagem borrada com a mesma forma
    """
    sigma = kernel_size / 4.0 if sigma is None else sigma
    kernel = gaussian_kernel(kernel_size, sigma)
    blurred = convolve1d(np.asarray(image, dtype=np.float64), kernel, axis=-1, mode='reflect')
    return convolve1d(blurred, kernel, axis=-2, mode='reflect')


def saliency_order(adapted_map: np.ndarray) -> np.ndarray:
    """Índices achatados em ordem decrescente de saliência; empates por índice."""
    return np.argsort(-np.asarray(adapted_map, dtype=np.float64).ravel(), kind='stable')


def step_counts(pixel_count: int, steps: int) -> np.ndarray:
    """Número acumulado de pixels alterados após cada passo: ceil(t·HW/steps), t = 0..steps."""
    t = np.arange(steps + 1, dtype=np.int64)
    return -(-t * pixel_count // steps)


def insertion_deletion(network, image: np.ndarray, adapted_map: np.ndarray, steps: int,
                       target_class: Optional[int] = None, kernel_size: int = BLUR_KERNEL_SIZE,
                       sigma: Optional[float] = None) -> InsertionDeletionResult:
    """
    Calcula as curvas de inserção e deleção.

    Args:
        network (Network): Classificador
        image (np.ndarray): Imagem (C, H, W)
        adapted_map (np.ndarray): Mapa adaptado (H, W)
        steps (int): Número de passos (2 <= steps <= H·W)
        target_class (int, optional): Classe acompanhada; padrão a classe prevista
        kernel_size (int): Núcleo do borrão da inserção
        sigma (float, optional): Desvio do borrão

    Returns:
        InsertionDeletionResult: Curvas com steps + 1 pontos cada

    Raises:
        ValueError: Se steps estiver fora do intervalo ou as formas divergirem
    """
    image = np.asarray(image, dtype=np.float64)
    channels, height, width = image.shape
    if np.shape(adapted_map) != (height, width):
        raise ValueError(f"insertion_deletion: mapa {np.shape(adapted_map)} incompatível com {(height, width)}")
    pixel_count = height * width
    if steps < 2 or steps > pixel_count:
        raise ValueError(f"insertion_deletion: steps deve estar em [2, {pixel_count}], recebido {steps}")

    if target_class is None:
        target_class = int(np.argmax(network.logits(image)))

    # Ordem dos pixels e quantos entram em cada passo
    order = saliency_order(adapted_map)
    counts = step_counts(pixel_count, steps)
    flat_image = image.reshape(channels, pixel_count)
    blurred = gaussian_blur(image, kernel_size, sigma).reshape(channels, pixel_count)

    # Monta todas as imagens da varredura de uma vez
    deleted = np.empty((steps + 1, channels, pixel_count))
    inserted = np.empty((steps + 1, channels, pixel_count))
    for t, count in enumerate(counts):
        chosen = order[:count]
        deleted[t] = flat_image
        deleted[t][:, chosen] = 0.0
        inserted[t] = blurred
        inserted[t][:, chosen] = flat_image[:, chosen]

    # Um único lote por curva
    shape = (steps + 1, channels, height, width)
    fractions = counts / pixel_count
    deletion = Curve('deletion', fractions,
                     network.probabilities(deleted.reshape(shape))[:, target_class])
    insertion = Curve('insertion', fractions,
                      network.probabilities(inserted.reshape(shape))[:, target_class])
    return InsertionDeletionResult(insertion=insertion, deletion=deletion, tracked_class=target_class)


def selectivity_sweep(network, image: np.ndarray, adapted_map: np.ndarray, target_class: int,
                      alphas: Sequence[float] = DEFAULT_ALPHAS,
                      image_id: str = '') -> List[Tuple[float, EvalRecord]]:
    """
    Avalia a máscara S^α para cada expoente α.

    Returns:
        List[Tuple[float, EvalRecord]]: Um registro por α, na ordem recebida
    """
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    if any(alpha <= 0 for alpha in alphas):
        raise ValueError(f"selectivity_sweep: expoentes devem ser positivos, recebido {list(alphas)}")
    original = network.probabilities(image)
    return [(float(alpha), evaluate_mask(network, image, adapted_map ** alpha, target_class,
                                         image_id, original))
            for alpha in alphas]
