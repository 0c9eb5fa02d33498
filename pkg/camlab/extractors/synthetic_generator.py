"""
Gerador do conjunto de imagens sintéticas.

Cada imagem tem um fundo de ruído de baixa amplitude e uma forma cuja
geometria e cor dependem da classe:

- classe 0: disco (canal vermelho)
- classe 1: quadrado (canal verde)
- classe 2: cruz (canal azul)

A caixa de referência é a caixa justa da forma. Cada imagem usa o próprio
fluxo aleatório derivado de (semente, índice).
"""

from typing import Tuple

import numpy as np
import structlog

from camlab.metrics.boxes import BBox

from .dataset import SyntheticDataset

logger = structlog.get_logger(__name__)

SHAPES = ('disc', 'square', 'cross')
NOISE_LEVEL = 0.1
INTENSITY_RANGE = (0.6, 1.0)
SECONDARY_CHANNEL_FACTOR = 0.2
SPLIT_FRACTIONS = (0.7, 0.1, 0.2)


def shape_mask(shape: str, size: int) -> np.ndarray:
    """Máscara booleana (size, size) da forma; ocupa a caixa inteira nas duas direções."""
    rows, cols = np.mgrid[0:size, 0:size]
    if shape == 'square':
        return np.ones((size, size), dtype=bool)
    if shape == 'disc':
        centre = (size - 1) / 2.0
        return (rows - centre) ** 2 + (cols - centre) ** 2 <= (size / 2.0) ** 2
    if shape == 'cross':
        band = max(2, size // 3)
        start = (size - band) // 2
        horizontal = (rows >= start) & (rows < start + band)
        vertical = (cols >= start) & (cols < start + band)
        return horizontal | vertical
    raise ValueError(f"Forma desconhecida: {shape}")


def size_range(image_size: int) -> Tuple[int, int]:
    """Lado mínimo e máximo da forma."""
    return max(4, image_size // 4), image_size // 2


def split_counts(n_per_class: int) -> Tuple[int, int]:
    """Quantidade de imagens de treino e validação por classe; o resto é teste."""
    n_train = int(round(SPLIT_FRACTIONS[0] * n_per_class))
    n_val = int(round(SPLIT_FRACTIONS[1] * n_per_class))
    return n_train, n_val


def render_image(seed: int, index: int, label: int, image_size: int,
                 channels: int = 3) -> Tuple[np.ndarray, BBox]:
    """
    Desenha uma imagem a partir do fluxo (seed, index).

    Returns:
        Tuple[np.ndarray, BBox]: Imagem (C, H, W) quantizada em 1/255 e caixa da forma
    """
    rng = np.random.default_rng([seed, index])
    # Fundo de ruído fraco
    image = rng.uniform(0.0, NOISE_LEVEL, size=(channels, image_size, image_size))

    # Tamanho, posição e intensidade da forma
    smallest, largest = size_range(image_size)
    side = int(rng.integers(smallest, largest + 1))
    x0 = int(rng.integers(0, image_size - side + 1))
    y0 = int(rng.integers(0, image_size - side + 1))
    intensity = rng.uniform(*INTENSITY_RANGE)

    # Canal dominante conforme a classe
    mask = shape_mask(SHAPES[label], side)
    patch = image[:, y0:y0 + side, x0:x0 + side]
    colour = np.full(channels, SECONDARY_CHANNEL_FACTOR * intensity)
    colour[label % channels] = intensity
    patch[:, mask] = colour[:, None]

    # Valores múltiplos de 1/255
    image = np.round(image * 255.0) / 255.0
    return image, BBox(x0, y0, x0 + side - 1, y0 + side - 1, label)


def generate_synthetic_dataset(seed: int = 42, n_per_class: int = 300, image_size: int = 32,
                               class_count: int = 3, channels: int = 3) -> SyntheticDataset:
    """
    Gera o conjunto sintético completo.

    As classes são intercaladas (índice i tem classe i mod C) e a divisão
    70/10/20 é feita dentro de cada classe, na ordem de geração.

    Args:
        seed (int): Semente
        n_per_class (int): Imagens por classe
        image_size (int): Lado das imagens quadradas
        class_count (int): 2 ou 3
        channels (int): Canais de cor

    Returns:
        SyntheticDataset: Conjunto gerado

    Raises:
        ValueError: Se a imagem for pequena demais ou os parâmetros forem inválidos
    """
    smallest, largest = size_range(image_size)
    if largest < smallest:
        raise ValueError(f"Imagem {image_size}x{image_size} pequena demais para formas de lado >= {smallest}")
    if not 2 <= class_count <= len(SHAPES):
        raise ValueError(f"class_count deve estar em [2, {len(SHAPES)}], recebido {class_count}")
    if n_per_class < 1:
        raise ValueError(f"n_per_class deve ser positivo, recebido {n_per_class}")
    if channels < class_count:
        raise ValueError(f"São necessários ao menos {class_count} canais, recebido {channels}")

    logger.info("Gerando conjunto sintético", seed=seed, n_per_class=n_per_class,
                image_size=image_size, class_count=class_count)

    n_train, n_val = split_counts(n_per_class)
    total = n_per_class * class_count
    images = np.empty((total, channels, image_size, image_size))
    labels = np.empty(total, dtype=np.int64)
    splits = np.empty(total, dtype=object)
    boxes = []

    for index in range(total):
        label = index % class_count
        # Posição dentro da classe define a partição
        position = index // class_count
        images[index], box = render_image(seed, index, label, image_size, channels)
        labels[index] = label
        boxes.append([box])
        if position < n_train:
            splits[index] = 'train'
        elif position < n_train + n_val:
            splits[index] = 'val'
        else:
            splits[index] = 'test'

    dataset = SyntheticDataset(
        ids=[f"img_{index:05d}" for index in range(total)],
        images=images,
        labels=labels,
        boxes=boxes,
        splits=splits.astype(str),
        class_count=class_count,
        seed=seed,
    )
    logger.info("Conjunto sintético gerado", images=total,
                train=len(dataset.indices('train')), val=len(dataset.indices('val')),
                test=len(dataset.indices('test')))
    return dataset
