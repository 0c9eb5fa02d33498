"""
Operações diferenciáveis sobre Tensor.

O conjunto de operações é fechado: apenas o que a rede de brinquedo, os
métodos CAM e o Opti-CAM precisam. Cada operação calcula o passo direto com
numpy e, se alguma entrada pertence a um Graph, registra a função do passo
reverso. Entradas sem grafo são constantes.

Convenções:
- imagens e mapas de ativação em lote têm forma (N, C, H, W);
- relu e abs têm subgradiente 0 em exatamente 0;
- empates em max_pool2d e nas normalizações vão para o primeiro elemento
  em ordem de varredura (row-major).
"""

from typing import Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from .tensor import Tensor


def _as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


def _finish(op: str, inputs: Sequence[Tensor], data: np.ndarray, backward) -> Tensor:
    graph = None
    for tensor in inputs:
        if tensor.graph is None:
            continue
        if graph is None:
            graph = tensor.graph
        elif tensor.graph is not graph:
            raise ValueError(f"{op}: entradas pertencem a grafos diferentes")
    if graph is None:
        return Tensor(data)
    return graph.record(op, inputs, data, backward)


def _broadcast_shape(op: str, a: Tensor, b: Tensor) -> Tuple[int, ...]:
    try:
        return np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ValueError(f"{op}: formas incompatíveis {a.shape} e {b.shape}") from None


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# Aritmética elemento a elemento

def add(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape('add', a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return _finish('add', (a, b), a.data + b.data, backward)


def sub(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape('sub', a, b)

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return _finish('sub', (a, b), a.data - b.data, backward)


def mul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    _broadcast_shape('mul', a, b)

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return _finish('mul', (a, b), a.data * b.data, backward)


def mul_scalar(x, k: float) -> Tensor:
    x = _as_tensor(x)
    return _finish('mul_scalar', (x,), x.data * k, lambda g: (g * k,))


def add_scalar(x, k: float) -> Tensor:
    x = _as_tensor(x)
    return _finish('add_scalar', (x,), x.data + k, lambda g: (g,))


def matmul(a, b) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul: formas incompatíveis {a.shape} e {b.shape}")

    def backward(g):
        return g @ b.data.T, a.data.T @ g

    return _finish('matmul', (a, b), a.data @ b.data, backward)


# Camadas

def conv2d(x, weight, bias) -> Tensor:
    """
    Convolução 2D com passo 1 e preenchimento de zeros "same".

    Args:
        x: Entrada (N, C, H, W)
        weight: Núcleo (O, C, k, k), k ímpar
        bias: Viés (O,)

    Returns:
        Tensor: Saída (N, O, H, W)
    """
    x, weight, bias = _as_tensor(x), _as_tensor(weight), _as_tensor(bias)
    if (x.ndim != 4 or weight.ndim != 4 or weight.shape[1] != x.shape[1]
            or weight.shape[2] != weight.shape[3] or weight.shape[2] % 2 == 0):
        raise ValueError(f"conv2d: formas incompatíveis {x.shape} e {weight.shape}")
    if bias.shape != (weight.shape[0],):
        raise ValueError(f"conv2d: formas incompatíveis {weight.shape} e {bias.shape}")

    k = weight.shape[2]
    pad = k // 2
    height, width = x.shape[2], x.shape[3]
    padded = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    # cols[n, c, h, w, i, j] = padded[n, c, h + i, w + j]
    cols = sliding_window_view(padded, (k, k), axis=(2, 3))
    out = np.tensordot(cols, weight.data, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias.data[None, :, None, None]

    def backward(g):
        grad_weight = np.tensordot(g, cols, axes=([0, 2, 3], [0, 2, 3]))
        grad_bias = g.sum(axis=(0, 2, 3))
        grad_cols = np.tensordot(g, weight.data, axes=([1], [0]))
        grad_padded = np.zeros_like(padded)
        for i in range(k):
            for j in range(k):
                grad_padded[:, :, i:i + height, j:j + width] += \
                    grad_cols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
        grad_x = grad_padded[:, :, pad:pad + height, pad:pad + width]
        return grad_x, grad_weight, grad_bias

    return _finish('conv2d', (x, weight, bias), out, backward)


def relu(x) -> Tensor:
    x = _as_tensor(x)
    active = x.data > 0
    return _finish('relu', (x,), np.where(active, x.data, 0.0), lambda g: (g * active,))


def max_pool2d(x) -> Tensor:
    """Max pooling 2×2 com passo 2 sobre (N, C, H, W), H e W pares."""
    x = _as_tensor(x)
    if x.ndim != 4 or x.shape[2] % 2 or x.shape[3] % 2:
        raise ValueError(f"max_pool2d: forma inválida {x.shape}")

    n, c, h, w = x.shape
    windows = (x.data.reshape(n, c, h // 2, 2, w // 2, 2)
               .transpose(0, 1, 2, 4, 3, 5)
               .reshape(n, c, h // 2, w // 2, 4))
    # argmax devolve o primeiro máximo: empates vão para o primeiro elemento da janela
    winner = windows.argmax(axis=-1)[..., None]
    out = np.take_along_axis(windows, winner, axis=-1)[..., 0]

    def backward(g):
        grad_windows = np.zeros((n, c, h // 2, w // 2, 4))
        np.put_along_axis(grad_windows, winner, g[..., None], axis=-1)
        grad_x = (grad_windows.reshape(n, c, h // 2, w // 2, 2, 2)
                  .transpose(0, 1, 2, 4, 3, 5)
                  .reshape(n, c, h, w))
        return (grad_x,)

    return _finish('max_pool2d', (x,), out, backward)


def global_average_pool(x) -> Tensor:
    """Média espacial: (N, C, H, W) -> (N, C)."""
    x = _as_tensor(x)
    if x.ndim != 4:
        raise ValueError(f"global_average_pool: forma inválida {x.shape}")
    area = x.shape[2] * x.shape[3]

    def backward(g):
        return (np.broadcast_to(g[:, :, None, None] / area, x.shape).copy(),)

    return _finish('global_average_pool', (x,), x.data.mean(axis=(2, 3)), backward)


def linear(x, weight, bias) -> Tensor:
    """Camada densa: (N, entrada) -> (N, saída) com pesos (saída, entrada)."""
    x, weight, bias = _as_tensor(x), _as_tensor(weight), _as_tensor(bias)
    if x.ndim != 2 or weight.ndim != 2 or weight.shape[1] != x.shape[1]:
        raise ValueError(f"linear: formas incompatíveis {x.shape} e {weight.shape}")
    if bias.shape != (weight.shape[0],):
        raise ValueError(f"linear: formas incompatíveis {weight.shape} e {bias.shape}")

    def backward(g):
        return g @ weight.data, g.T @ x.data, g.sum(axis=0)

    return _finish('linear', (x, weight, bias), x.data @ weight.data.T + bias.data, backward)


def softmax(x) -> Tensor:
    """Softmax no último eixo."""
    x = _as_tensor(x)
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    out = exps / exps.sum(axis=-1, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=-1, keepdims=True)),)

    return _finish('softmax', (x,), out, backward)


def cross_entropy(logits, labels) -> Tensor:
    """
    Entropia cruzada média (log-softmax + NLL fundidos).

    Args:
        logits: Tensor (N, C)
        labels: Índices de classe (N,)

    Returns:
        Tensor: Perda escalar
    """
    logits = _as_tensor(logits)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ValueError(f"cross_entropy: formas incompatíveis {logits.shape} e {labels.shape}")

    count = logits.shape[0]
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    loss = -log_probs[np.arange(count), labels].mean()

    def backward(g):
        grad = np.exp(log_probs)
        grad[np.arange(count), labels] -= 1.0
        return (grad * (g / count),)

    return _finish('cross_entropy', (logits,), np.array(loss), backward)


def sigmoid(x) -> Tensor:
    x = _as_tensor(x)
    out = expit(x.data)
    return _finish('sigmoid', (x,), out, lambda g: (g * out * (1.0 - out),))


def abs(x) -> Tensor:  # noqa: A001
    x = _as_tensor(x)
    return _finish('abs', (x,), np.abs(x.data), lambda g: (g * np.sign(x.data),))


# Reduções e forma

def sum(x) -> Tensor:  # noqa: A001
    x = _as_tensor(x)
    return _finish('sum', (x,), np.array(x.data.sum()),
                   lambda g: (np.full(x.shape, float(g)),))


def mean(x) -> Tensor:
    x = _as_tensor(x)
    return _finish('mean', (x,), np.array(x.data.mean()),
                   lambda g: (np.full(x.shape, float(g) / x.size),))


def reshape(x, shape) -> Tensor:
    x = _as_tensor(x)
    try:
        out = x.data.reshape(shape)
    except ValueError:
        raise ValueError(f"reshape: forma {x.shape} incompatível com {tuple(shape)}") from None
    return _finish('reshape', (x,), out, lambda g: (g.reshape(x.shape),))


def pick(x, index) -> Tensor:
    """Seleciona um único elemento (ex.: o logit y_c) como tensor escalar."""
    x = _as_tensor(x)
    index = tuple(index) if isinstance(index, (tuple, list)) else (index,)
    try:
        value = x.data[index]
    except IndexError:
        raise ValueError(f"pick: índice {index} fora da forma {x.shape}") from None
    if np.ndim(value) != 0:
        raise ValueError(f"pick: índice {index} não seleciona um escalar em {x.shape}")

    def backward(g):
        grad = np.zeros(x.shape)
        grad[index] = g
        return (grad,)

    return _finish('pick', (x,), np.array(value), backward)


def concat(tensors: Sequence, axis: int = 1) -> Tensor:
    """Concatena tensores no eixo de canais."""
    tensors = [_as_tensor(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        shapes = ', '.join(str(t.shape) for t in tensors)
        raise ValueError(f"concat: formas incompatíveis {shapes}") from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return _finish('concat', tuple(tensors), out, backward)


# Mapas de saliência

def _interpolation_matrix(source: int, target: int) -> np.ndarray:
    matrix = np.zeros((target, source))
    if source == 1:
        matrix[:, 0] = 1.0
        return matrix
    positions = np.arange(target) * (source - 1) / (target - 1)
    lower = np.minimum(np.floor(positions).astype(np.int64), source - 2)
    frac = positions - lower
    rows = np.arange(target)
    matrix[rows, lower] = 1.0 - frac
    matrix[rows, lower + 1] = frac
    return matrix


def bilinear_upsample(x, size: Tuple[int, int]) -> Tensor:
    """
    Interpolação bilinear com cantos alinhados nos dois últimos eixos.

    Args:
        x: Mapa (..., h, w)
        size (Tuple[int, int]): Resolução alvo (H, W), com H >= h e W >= w

    Returns:
        Tensor: Mapa (..., H, W)
    """
    x = _as_tensor(x)
    target_h, target_w = int(size[0]), int(size[1])
    if x.ndim < 2:
        raise ValueError(f"bilinear_upsample: forma inválida {x.shape}")
    source_h, source_w = x.shape[-2], x.shape[-1]
    if target_h < source_h or target_w < source_w:
        raise ValueError(
            f"bilinear_upsample: alvo {(target_h, target_w)} menor que a origem {(source_h, source_w)}")

    rows = _interpolation_matrix(source_h, target_h)
    cols = _interpolation_matrix(source_w, target_w)
    out = np.matmul(np.matmul(rows, x.data), cols.T)

    def backward(g):
        return (np.matmul(np.matmul(rows.T, g), cols),)

    return _finish('bilinear_upsample', (x,), out, backward)


def range_normalize(x) -> Tensor:
    """
    (A - min) / (max - min) sobre todos os elementos; mapa constante vira zeros.
    """
    x = _as_tensor(x)
    flat = x.data.ravel()
    low_index, high_index = int(flat.argmin()), int(flat.argmax())
    spread = flat[high_index] - flat[low_index]
    if spread == 0:
        return _finish('range_normalize', (x,), np.zeros(x.shape), lambda g: (np.zeros(x.shape),))
    out = (x.data - flat[low_index]) / spread

    def backward(g):
        g_flat = g.ravel()
        total = g_flat.sum() / spread
        weighted = (g_flat * out.ravel()).sum() / spread
        grad = g_flat / spread
        grad[low_index] += weighted - total
        grad[high_index] -= weighted
        return (grad.reshape(x.shape),)

    return _finish('range_normalize', (x,), out, backward)


def max_normalize(x) -> Tensor:
    """A / max(A); mapa com máximo 0 vira zeros."""
    x = _as_tensor(x)
    flat = x.data.ravel()
    high_index = int(flat.argmax())
    peak = flat[high_index]
    if peak == 0:
        return _finish('max_normalize', (x,), np.zeros(x.shape), lambda g: (np.zeros(x.shape),))
    out = x.data / peak

    def backward(g):
        g_flat = g.ravel()
        grad = g_flat / peak
        grad[high_index] -= (g_flat * out.ravel()).sum() / peak
        return (grad.reshape(x.shape),)

    return _finish('max_normalize', (x,), out, backward)
