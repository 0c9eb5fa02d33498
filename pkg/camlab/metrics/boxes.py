"""
Caixas delimitadoras com limites inclusivos em pixels.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class BBox:
    """
    Caixa [x0, x1] x [y0, y1] (inclusiva) com rótulo de classe.

    x indexa colunas e y indexa linhas.
    """

    x0: int
    y0: int
    x1: int
    y1: int
    label: int = -1

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1 or min(self.x0, self.y0) < 0:
            raise ValueError(f"Caixa inválida: {self}")

    @property
    def area(self) -> int:
        return (self.x1 - self.x0 + 1) * (self.y1 - self.y0 + 1)

    def fits(self, height: int, width: int) -> bool:
        return self.x1 < width and self.y1 < height

    def as_list(self) -> list:
        return [self.x0, self.y0, self.x1, self.y1]

    def indicator(self, shape: Tuple[int, int]) -> np.ndarray:
        """Máscara binária (H, W) com 1 dentro da caixa."""
        mask = np.zeros(shape)
        mask[self.y0:self.y1 + 1, self.x0:self.x1 + 1] = 1.0
        return mask

    @classmethod
    def full_image(cls, shape: Tuple[int, int], label: int = -1) -> 'BBox':
        return cls(0, 0, shape[1] - 1, shape[0] - 1, label)


def iou(a: BBox, b: BBox) -> float:
    """Interseção sobre união de duas caixas."""
    inter_w = min(a.x1, b.x1) - max(a.x0, b.x0) + 1
    inter_h = min(a.y1, b.y1) - max(a.y0, b.y0) + 1
    if inter_w <= 0 or inter_h <= 0:
        return 0.0
    intersection = inter_w * inter_h
    return intersection / (a.area + b.area - intersection)


def union_mask(boxes: Sequence[BBox], shape: Tuple[int, int]) -> np.ndarray:
    """Indicador da união U das caixas."""
    mask = np.zeros(shape)
    for box in boxes:
        mask = np.maximum(mask, box.indicator(shape))
    return mask
