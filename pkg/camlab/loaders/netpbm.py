"""
Codificação de imagens PPM (P6) e PGM (P5) com maxval 255, via Pillow.
"""

import io

import numpy as np
from PIL import Image


def quantize(values: np.ndarray) -> np.ndarray:
    """round(255·v) limitado a [0, 255] como uint8."""
    return np.clip(np.round(np.asarray(values, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def _encode(pixels: np.ndarray) -> bytes:
    # uint8 (H, W) vira modo L (P5); (H, W, 3) vira RGB (P6)
    buffer = io.BytesIO()
    Image.fromarray(pixels).save(buffer, format='PPM')
    return buffer.getvalue()


def encode_ppm(image: np.ndarray) -> bytes:
    """Imagem (3, H, W) em [0,1] -> bytes P6."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ValueError(f"encode_ppm: esperada imagem (3, H, W), recebido {image.shape}")
    # Pillow espera (H, W, C)
    return _encode(np.ascontiguousarray(quantize(image).transpose(1, 2, 0)))


def encode_pgm(values: np.ndarray) -> bytes:
    """Mapa (H, W) em [0,1] -> bytes P5."""
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError(f"encode_pgm: esperado mapa 2D, recebido {values.shape}")
    return _encode(quantize(values))
