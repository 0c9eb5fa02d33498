"""
Métricas de classificação sob mascaramento: AD, AG e AI.

Cada imagem gera um EvalRecord com a probabilidade original p_c e a
probabilidade o_c da imagem mascarada. As métricas são médias sobre os
registros, expressas em porcentagem.
"""

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
import structlog

from camlab.transformers.masking import apply_mask

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class EvalRecord:
    """
    Resultado do mascaramento de uma imagem.

    Attributes:
        image_id (str): Identificador da imagem
        target_class (int): Classe de referência c
        original (float): p_c, probabilidade de c na imagem original
        masked (float): o_c, probabilidade de c na imagem mascarada
        predicted_class (int): Classe prevista c_p na imagem original
        predicted_probability (float): p_{c_p}
    """

    image_id: str
    target_class: int
    original: float
    masked: float
    predicted_class: int = -1
    predicted_probability: float = float('nan')

    @property
    def drop(self) -> float:
        """[p - o]_+ / p"""
        if self.masked >= self.original:
            return 0.0
        return (self.original - self.masked) / self.original

    @property
    def gain(self) -> float:
        """[o - p]_+ / (1 - p)"""
        if self.masked <= self.original:
            return 0.0
        return (self.masked - self.original) / (1.0 - self.original)

    @property
    def increased(self) -> bool:
        return self.original < self.masked

    def as_dict(self) -> dict:
        return asdict(self)


def _check(records: Sequence[EvalRecord], metric: str) -> None:
    if len(records) == 0:
        raise ValueError(f"{metric}: nenhum registro para agregar")


def average_drop(records: Sequence[EvalRecord]) -> float:
    """AD = (1/N) Σ [p - o]_+ / p × 100."""
    _check(records, 'average_drop')
    return float(np.mean([r.drop for r in records]) * 100.0)


def average_gain(records: Sequence[EvalRecord]) -> float:
    """AG = (1/N) Σ [o - p]_+ / (1 - p) × 100."""
    _check(records, 'average_gain')
    return float(np.mean([r.gain for r in records]) * 100.0)


def average_increase(records: Sequence[EvalRecord]) -> float:
    """AI = (1/N) Σ 1[p < o] × 100."""
    _check(records, 'average_increase')
    return float(np.mean([r.increased for r in records]) * 100.0)


def evaluate_mask(network, image: np.ndarray, mask: np.ndarray, target_class: int,
                  image_id: str = '', original_probabilities: Optional[np.ndarray] = None) -> EvalRecord:
    """
    Mede p_c e o_c para uma máscara.

    Args:
        network (Network): Classificador
        image (np.ndarray): Imagem (C, H, W) em [0,1]
        mask (np.ndarray): Máscara (H, W) em [0,1]
        target_class (int): Classe c
        image_id (str): Identificador
        original_probabilities (np.ndarray, optional): softmax(f(x)) já calculado

    Returns:
        EvalRecord: Registro da imagem
    """
    if original_probabilities is None:
        original_probabilities = network.probabilities(image)
    masked_probabilities = network.probabilities(apply_mask(image, mask))
    predicted = int(np.argmax(original_probabilities))
    return EvalRecord(
        image_id=image_id,
        target_class=int(target_class),
        original=float(original_probabilities[target_class]),
        masked=float(masked_probabilities[target_class]),
        predicted_class=predicted,
        predicted_probability=float(original_probabilities[predicted]),
    )


def classification_summary(records: Sequence[EvalRecord]) -> dict:
    """AD, AG e AI de um conjunto de registros."""
    return {
        'AD': average_drop(records),
        'AG': average_gain(records),
        'AI': average_increase(records),
    }
