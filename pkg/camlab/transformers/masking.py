"""
Adaptação de mapas de saliência e mascaramento de imagens.

A adaptação (reamostragem bilinear + normalização) é feita com as mesmas
operações diferenciáveis usadas pelo Opti-CAM, garantindo que o mapa
otimizado e o mapa avaliado coincidam.
"""

from enum import Enum
from typing import Tuple

import numpy as np

from camlab.autodiff import Tensor, ops


class Normalization(str, Enum):
    """Função n que leva o mapa reamostrado para [0,1]."""

    RANGE = 'range'
    MAX = 'max'
    SIGMOID = 'sigmoid'


def normalize(x: Tensor, normalization: Normalization) -> Tensor:
    """Aplica a normalização escolhida (diferenciável)."""
    normalization = Normalization(normalization)
    if normalization is Normalization.RANGE:
        return ops.range_normalize(x)
    if normalization is Normalization.MAX:
        return ops.max_normalize(x)
    return ops.sigmoid(x)


def adapt_tensor(raw: Tensor, target: Tuple[int, int], normalization: Normalization) -> Tensor:
    """Versão em Tensor de adapt_saliency, usada dentro do grafo do Opti-CAM."""
    return normalize(ops.bilinear_upsample(raw, target), normalization)


def adapt_saliency(raw, target: Tuple[int, int],
                   normalization: Normalization = Normalization.RANGE) -> np.ndarray:
    """
    Reamostra um mapa h x w para H x W e normaliza para [0,1].

    Args:
        raw: Mapa bruto (h, w)
        target (Tuple[int, int]): Resolução da imagem (H, W)
        normalization (Normalization): Range, Max ou Sigmoid

    Returns:
        np.ndarray: Mapa adaptado (H, W)

    Raises:
        ValueError: Se o mapa contiver NaN ou não for 2D
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 2:
        raise ValueError(f"adapt_saliency: mapa deve ser 2D, recebido {raw.shape}")
    if np.isnan(raw).any():
        raise ValueError("adapt_saliency: mapa contém NaN")
    return adapt_tensor(Tensor(raw), target, normalization).numpy()


def apply_mask(image, mask) -> np.ndarray:
    """
    Produto de Hadamard entre imagem (C, H, W) e máscara (H, W), antes da normalização da rede.

    Raises:
        ValueError: Se as dimensões espaciais divergirem
    """
    image = np.asarray(image, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if image.ndim != 3 or mask.shape != image.shape[1:]:
        raise ValueError(f"apply_mask: formas incompatíveis {image.shape} e {mask.shape}")
    return image * mask[None, :, :]


def mask_tensor(image: np.ndarray, mask: Tensor) -> Tensor:
    """Versão diferenciável de apply_mask; devolve um lote (1, C, H, W)."""
    height, width = mask.shape
    return ops.mul(image[None], ops.reshape(mask, (1, 1, height, width)))
