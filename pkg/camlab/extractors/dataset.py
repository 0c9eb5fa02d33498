"""
Conjunto de dados de imagens sintéticas com caixas de referência.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from camlab.metrics.boxes import BBox

SPLITS = ('train', 'val', 'test')


@dataclass
class SyntheticDataset:
    """
    Imagens (N, C, H, W) em [0,1], rótulos, caixas por imagem e partições.

    Attributes:
        ids (List[str]): Identificador de cada imagem
        images (np.ndarray): Pixels (N, C, H, W)
        labels (np.ndarray): Classe de cada imagem
        boxes (List[List[BBox]]): Caixas de referência por imagem (>= 1)
        splits (np.ndarray): "train", "val" ou "test" por imagem
        class_count (int): Número de classes
        seed (int): Semente de geração
    """

    ids: List[str]
    images: np.ndarray
    labels: np.ndarray
    boxes: List[List[BBox]]
    splits: np.ndarray
    class_count: int
    seed: int

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def input_shape(self) -> Tuple[int, int, int]:
        return tuple(int(v) for v in self.images.shape[1:])

    def indices(self, split: str) -> np.ndarray:
        if split not in SPLITS:
            raise ValueError(f"Partição desconhecida: {split}")
        return np.flatnonzero(self.splits == split)

    def subset(self, split: str) -> 'SyntheticDataset':
        """Retorna apenas as imagens de uma partição, na ordem original."""
        index = self.indices(split)
        return SyntheticDataset(
            ids=[self.ids[i] for i in index],
            images=self.images[index],
            labels=self.labels[index],
            boxes=[self.boxes[i] for i in index],
            splits=self.splits[index],
            class_count=self.class_count,
            seed=self.seed,
        )

    def position(self, image_id: str) -> int:
        try:
            return self.ids.index(image_id)
        except ValueError:
            raise ValueError(f"Imagem desconhecida: {image_id}") from None
