"""
Arquivo de mapa de saliência "SALV1".

Cabeçalho ASCII "SALV1 <h> <w>\\n" seguido de h·w valores f64 little-endian
do mapa adaptado, em ordem de linhas. Um PGM (P5) de mesmo nome com
extensão .pgm é gravado ao lado para inspeção visual.
"""

from pathlib import Path
from typing import Dict, Union

import numpy as np
import structlog

from .files import atomic_write_bytes
from .netpbm import encode_pgm

logger = structlog.get_logger(__name__)

MAGIC = 'SALV1'


def encode_saliency(values: np.ndarray) -> bytes:
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"encode_saliency: esperado mapa 2D, recebido {values.shape}")
    height, width = values.shape
    return f"{MAGIC} {height} {width}\n".encode('ascii') + values.astype('<f8').tobytes()


def decode_saliency(data: bytes, path: str = '<memória>') -> np.ndarray:
    """
    Raises:
        ValueError: Assinatura inválida, cabeçalho malformado ou dados truncados
    """
    newline = data.find(b'\n')
    if newline < 0:
        raise ValueError(f"Arquivo de saliência sem cabeçalho: {path}")
    fields = data[:newline].split(b' ')
    if len(fields) != 3 or fields[0] != MAGIC.encode('ascii'):
        raise ValueError(f"Assinatura inválida no arquivo de saliência: {path}")
    try:
        height, width = int(fields[1]), int(fields[2])
    except ValueError:
        raise ValueError(f"Cabeçalho inválido no arquivo de saliência: {path}") from None
    payload = data[newline + 1:]
    if len(payload) != 8 * height * width:
        raise ValueError(
            f"Arquivo de saliência truncado: {path} ({len(payload)} bytes, esperado {8 * height * width})")
    return np.frombuffer(payload, dtype='<f8').astype(np.float64).reshape(height, width)


def export_saliency(saliency, path: Union[str, Path]) -> Dict[str, str]:
    """
    Grava o mapa adaptado em SALV1 e o PGM correspondente.

    Args:
        saliency: SaliencyMap ou array (H, W)
        path: Destino do arquivo SALV1

    Returns:
        Dict[str, str]: Caminhos gravados
    """
    path = Path(path)
    values = getattr(saliency, 'adapted', saliency)
    atomic_write_bytes(path, encode_saliency(values))
    preview = path.with_suffix('.pgm')
    atomic_write_bytes(preview, encode_pgm(values))
    logger.info("Mapa de saliência exportado", path=str(path), preview=str(preview))
    return {'saliency': str(path), 'preview': str(preview)}


def import_saliency(path: Union[str, Path]) -> np.ndarray:
    """Lê um arquivo SALV1 e devolve o mapa (H, W)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Arquivo de saliência não encontrado: {path}")
    return decode_saliency(path.read_bytes(), str(path))
