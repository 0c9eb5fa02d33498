"""
Arquivo de pesos "OCW1".

Formato (little-endian, sem preenchimento):
    b"OCW1", u32 número de tensores
    por tensor: u16 tamanho do nome, nome UTF-8, u8 posto, posto x u32 extensões,
    produto das extensões x f64

Além dos parâmetros da rede, o tensor "meta.input_shape" guarda (C, H, W).
"""

import struct
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
import structlog

from camlab.nn import Network, build_toy_cnn

from .files import atomic_write_bytes

logger = structlog.get_logger(__name__)

MAGIC = b'OCW1'
INPUT_SHAPE_KEY = 'meta.input_shape'
CLASSIFIER_KEY = 'fc.weight'


def encode_tensors(tensors: Dict[str, np.ndarray]) -> bytes:
    parts = [MAGIC, struct.pack('<I', len(tensors))]
    for name, value in tensors.items():
        value = np.asarray(value, dtype=np.float64)
        encoded = name.encode('utf-8')
        parts.append(struct.pack('<H', len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack('<B', value.ndim))
        parts.append(struct.pack(f'<{value.ndim}I', *value.shape))
        parts.append(value.astype('<f8').tobytes())
    return b''.join(parts)


class _Cursor:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.path = path
        self.position = 0

    def take(self, size: int) -> bytes:
        if self.position + size > len(self.data):
            raise ValueError(f"Arquivo de pesos truncado: {self.path} (byte {self.position})")
        chunk = self.data[self.position:self.position + size]
        self.position += size
        return chunk

    def unpack(self, fmt: str) -> Tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_tensors(data: bytes, path: str = '<memória>') -> Dict[str, np.ndarray]:
    """
    Decodifica o conteúdo de um arquivo OCW1.

    Raises:
        ValueError: Assinatura inválida, arquivo truncado ou bytes sobrando
    """
    cursor = _Cursor(data, path)
    if cursor.take(len(MAGIC)) != MAGIC:
        raise ValueError(f"Assinatura inválida no arquivo de pesos: {path}")
    (count,) = cursor.unpack('<I')
    tensors = {}
    for _ in range(count):
        (name_length,) = cursor.unpack('<H')
        name = cursor.take(name_length).decode('utf-8')
        (rank,) = cursor.unpack('<B')
        shape = cursor.unpack(f'<{rank}I')
        size = int(np.prod(shape, dtype=np.int64))
        values = np.frombuffer(cursor.take(8 * size), dtype='<f8').astype(np.float64)
        tensors[name] = values.reshape(shape)
    if cursor.position != len(data):
        raise ValueError(f"Arquivo de pesos com {len(data) - cursor.position} bytes extras: {path}")
    return tensors


def save_weights(network: Network, path: str) -> Dict[str, object]:
    """
    Grava todos os tensores da rede.

    Returns:
        Dict[str, object]: Relatório (caminho, tensores, bytes)
    """
    try:
        data = serialize_network(network)
        atomic_write_bytes(path, data)
        report = {'path': str(path), 'tensors': len(network.parameter_arrays()) + 1,
                  'bytes': len(data)}
        logger.info("Pesos gravados", **report)
        return report
    except Exception as e:
        logger.error("Erro ao gravar pesos", error=str(e), path=str(path))
        raise


def load_weights(path: str, class_count: Optional[int] = None,
                 input_shape: Optional[Tuple[int, int, int]] = None) -> Network:
    """
    Lê um arquivo de pesos e reconstrói a CNN de brinquedo.

    Args:
        path (str): Arquivo OCW1
        class_count (int, optional): Número de classes esperado
        input_shape (Tuple[int, int, int], optional): Forma de entrada esperada

    Returns:
        Network: Rede com os tensores lidos

    Raises:
        FileNotFoundError: Se o arquivo não existir
        ValueError: Formato inválido ou formas incompatíveis com a arquitetura
    """
    path = Path(path)
    try:
        if not path.exists():
            raise FileNotFoundError(f"Arquivo de pesos não encontrado: {path}")
        tensors = decode_tensors(path.read_bytes(), str(path))

        if INPUT_SHAPE_KEY not in tensors or CLASSIFIER_KEY not in tensors:
            raise ValueError(f"Arquivo de pesos sem {INPUT_SHAPE_KEY} ou {CLASSIFIER_KEY}: {path}")
        stored_shape = tuple(int(v) for v in tensors.pop(INPUT_SHAPE_KEY))
        stored_classes = int(tensors[CLASSIFIER_KEY].shape[0])

        if class_count is not None and class_count != stored_classes:
            raise ValueError(f"Arquivo de pesos tem {stored_classes} classes, esperado {class_count}")
        if input_shape is not None and tuple(input_shape) != stored_shape:
            raise ValueError(f"Arquivo de pesos tem entrada {stored_shape}, esperado {tuple(input_shape)}")

        network = build_toy_cnn(stored_classes, stored_shape)
        expected = set(network.parameter_arrays())
        if set(tensors) != expected:
            raise ValueError(
                f"Tensores divergentes da arquitetura: faltando {sorted(expected - set(tensors))}, "
                f"sobrando {sorted(set(tensors) - expected)}")
        network = network.with_parameters(tensors)
        logger.info("Pesos carregados", path=str(path), class_count=stored_classes,
                    input_shape=list(stored_shape))
        return network

    except Exception as e:
        logger.error("Erro ao carregar pesos", error=str(e), path=str(path))
        raise


def serialize_network(network: Network) -> bytes:
    """Bytes OCW1 da rede, usados para comparar redes byte a byte."""
    tensors = {INPUT_SHAPE_KEY: np.array(network.input_shape, dtype=np.float64)}
    tensors.update(network.parameter_arrays())
    return encode_tensors(tensors)
