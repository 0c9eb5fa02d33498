"""
Métodos de atribuição da família CAM.

Todos produzem um mapa bruto S = h(Σ_k w_k A^k) na resolução do ponto de
captura, com h = relu, e o mapa adaptado (reamostrado e normalizado por
Range) na resolução da imagem. Os métodos diferem apenas nos pesos w_k:

- cam: linha c do classificador (exige GAP -> linear após o ponto de captura)
- grad_cam: média espacial do gradiente de y_c
- grad_cam_pp: pesos alfa de segunda ordem sobre o gradiente de exp(y_c)
- xgrad_cam: gradiente ponderado pela ativação normalizada
- score_cam: softmax do aumento de confiança ao mascarar com cada mapa
- ablation_cam: queda relativa do logit ao zerar cada canal
- fake_cam: mapa uniforme com o pixel superior esquerdo zerado
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from camlab.autodiff import Graph, ops
from camlab.nn import Network

from .masking import Normalization, adapt_saliency, apply_mask

logger = structlog.get_logger(__name__)


@dataclass
class SaliencyMap:
    """
    Mapa de saliência para um par (imagem, classe).

    Attributes:
        raw (np.ndarray): Mapa bruto não negativo (h, w)
        adapted (np.ndarray): Mapa (H, W) em [0,1]
        method (str): Método que gerou o mapa
        target_class (int): Classe explicada
        channel_weights (np.ndarray, optional): Pesos w_k usados na combinação
    """

    raw: np.ndarray
    adapted: np.ndarray
    method: str
    target_class: int
    channel_weights: Optional[np.ndarray] = None


def check_class(network: Network, target_class: int) -> None:
    if not 0 <= target_class < network.class_count:
        raise ValueError(f"Classe {target_class} fora de [0, {network.class_count})")


def combine_channels(weights: np.ndarray, features: np.ndarray) -> np.ndarray:
    """relu(Σ_k w_k A^k) para mapas (K, h, w)."""
    return np.maximum(np.tensordot(weights, features, axes=1), 0.0)


def feature_gradient(network: Network, features: np.ndarray, target_class: int,
                     layer: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradiente de y_c em relação aos mapas do ponto de captura.

    Args:
        network (Network): Classificador
        features (np.ndarray): Mapas (K, h, w)
        target_class (int): Classe c
        layer (str): Ponto de captura

    Returns:
        Tuple[np.ndarray, np.ndarray]: Gradiente (K, h, w) e logits (C,)
    """
    graph = Graph()
    stack = graph.variable(features[None])
    logits = network.head(stack, layer)
    graph.backward(ops.pick(logits, (0, target_class)))
    return graph.grad(stack)[0], logits.numpy()[0]


def _finish(network: Network, image: np.ndarray, raw: np.ndarray, method: str,
            target_class: int, weights: np.ndarray) -> SaliencyMap:
    adapted = adapt_saliency(raw, image.shape[1:], Normalization.RANGE)
    logger.debug("Mapa de saliência calculado", method=method, target_class=target_class)
    return SaliencyMap(raw=raw, adapted=adapted, method=method, target_class=target_class,
                       channel_weights=weights)


def cam(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """
    CAM: pesos da linha c do classificador.

    Raises:
        ValueError: Se o ponto de captura não for seguido diretamente de GAP -> linear
    """
    check_class(network, target_class)
    index = network.hook_index(layer)
    tail = [l.kind for l in network.layers[index + 1:]]
    if tail != ['global_average_pool', 'linear']:
        raise ValueError(f"cam: a camada {layer} não é a última camada de mapas (seguida de {tail})")

    _, features = network.forward_with_features(image, layer)
    weights = np.array(network.layers[-1].parameters['weight'][target_class])
    return _finish(network, image, combine_channels(weights, features), 'cam', target_class, weights)


def grad_cam(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """Grad-CAM: w_k = GAP(∂y_c/∂A^k)."""
    check_class(network, target_class)
    _, features = network.forward_with_features(image, layer)
    grads, _ = feature_gradient(network, features, target_class, layer)
    weights = grads.mean(axis=(1, 2))
    return _finish(network, image, combine_channels(weights, features), 'grad-cam',
                   target_class, weights)


def gradcam_pp_alpha(features: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """
    Coeficientes α^k_ij = g² / (2g² + Σ_ab A^k_ab · g³), com 0/0 -> 0.

    Args:
        features (np.ndarray): Mapas (K, h, w)
        grads (np.ndarray): Gradiente de exp(y_c) em relação aos mapas (K, h, w)
    """
    squared = grads ** 2
    totals = features.sum(axis=(1, 2), keepdims=True)
    denominator = 2.0 * squared + totals * grads ** 3
    safe = np.where(denominator != 0, denominator, 1.0)
    return np.where(denominator != 0, squared / safe, 0.0)


def grad_cam_pp(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """Grad-CAM++: w_k = Σ_ij α^k_ij relu(g_ij), g = ∂exp(y_c - max y)/∂A."""
    check_class(network, target_class)
    _, features = network.forward_with_features(image, layer)
    grads, logits = feature_gradient(network, features, target_class, layer)
    # Gradientes do escore exponencial
    exp_grads = np.exp(logits[target_class] - logits.max()) * grads
    alpha = gradcam_pp_alpha(features, exp_grads)
    weights = (alpha * np.maximum(exp_grads, 0.0)).sum(axis=(1, 2))
    return _finish(network, image, combine_channels(weights, features), 'grad-cam++',
                   target_class, weights)


def xgrad_weights(features: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """w_k = Σ_ij (A^k_ij / Σ_ab A^k_ab) ∂y_c/∂A^k_ij, canal nulo -> 0."""
    totals = features.sum(axis=(1, 2))
    safe = np.where(totals != 0, totals, 1.0)
    weights = (features * grads).sum(axis=(1, 2)) / safe
    return np.where(totals != 0, weights, 0.0)


def xgrad_cam(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """XGrad-CAM: gradiente ponderado pela ativação normalizada do canal."""
    check_class(network, target_class)
    _, features = network.forward_with_features(image, layer)
    grads, _ = feature_gradient(network, features, target_class, layer)
    weights = xgrad_weights(features, grads)
    return _finish(network, image, combine_channels(weights, features), 'xgrad-cam',
                   target_class, weights)


def score_cam_scores(network: Network, image: np.ndarray, target_class: int,
                     layer: str) -> Tuple[np.ndarray, np.ndarray]:
    """
    Aumentos de confiança u^c_k = f(x ⊙ n(up(A^k)))_c - f(0)_c.

    Usa K + 1 passos do classificador (K máscaras + imagem nula).

    Returns:
        Tuple[np.ndarray, np.ndarray]: Escores u (K,) e mapas (K, h, w)
    """
    check_class(network, target_class)
    _, features = network.forward_with_features(image, layer)
    target = image.shape[1:]
    masked = [apply_mask(image, adapt_saliency(channel, target, Normalization.RANGE))
              for channel in features]
    # O último elemento do lote é a imagem nula
    batch = np.stack(masked + [np.zeros_like(image)])
    scores = network.logits(batch)[:, target_class]
    return scores[:-1] - scores[-1], features


def score_cam(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """Score-CAM: w = softmax(u^c)."""
    scores, features = score_cam_scores(network, image, target_class, layer)
    weights = ops.softmax(scores).numpy()
    return _finish(network, image, combine_channels(weights, features), 'score-cam',
                   target_class, weights)


def ablation_cam(network: Network, image: np.ndarray, target_class: int, layer: str) -> SaliencyMap:
    """
    Ablation-CAM: w_k = (y_c - y_c^(k)) / y_c, ou y_c - y_c^(k) quando y_c = 0.

    Usa K + 1 passos da cabeça da rede (original + K canais zerados).
    """
    check_class(network, target_class)
    _, features = network.forward_with_features(image, layer)
    # Linha 0 intacta; linha k+1 com o canal k zerado
    ablated = np.repeat(features[None], len(features) + 1, axis=0)
    for k in range(len(features)):
        ablated[k + 1, k] = 0.0
    logits = network.head_logits(ablated, layer)

    score = logits[0, target_class]
    ablated_scores = logits[1:, target_class].copy()
    # zerar um canal já nulo não muda nada
    dead = ~features.reshape(len(features), -1).any(axis=1)
    ablated_scores[dead] = score

    drops = score - ablated_scores
    weights = drops / score if score != 0 else drops
    return _finish(network, image, combine_channels(weights, features), 'ablation-cam',
                   target_class, weights)


def fake_cam(image_shape, target_class: int = -1) -> SaliencyMap:
    """
    Fake-CAM: mapa adaptado igual a 1 exceto no pixel (0, 0).

    Args:
        image_shape: (H, W) ou (C, H, W)
        target_class (int): Ignorado pelo mapa; apenas registrado
    """
    height, width = tuple(image_shape)[-2:]
    adapted = np.ones((height, width))
    adapted[0, 0] = 0.0
    return SaliencyMap(raw=adapted.copy(), adapted=adapted, method='fake-cam',
                       target_class=target_class)
