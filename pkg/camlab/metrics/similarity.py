"""
Medidas de similaridade entre mapas usadas no teste de randomização.
"""

import numpy as np
from scipy.stats import rankdata

SSIM_DYNAMIC_RANGE = 1.0


def spearman_correlation(a: np.ndarray, b: np.ndarray, absolute: bool = False) -> float:
    """
    Correlação de Pearson entre os postos médios (empates com posto médio).

    Args:
        a (np.ndarray): Primeiro mapa
        b (np.ndarray): Segundo mapa, mesma forma
        absolute (bool): Se True, ordena |valores|

    Returns:
        float: Valor em [-1, 1]; 1 para mapas idênticos, 0 se forem
        diferentes e algum for constante
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"spearman_correlation: formas diferentes {a.shape} e {b.shape}")
    if absolute:
        a, b = np.abs(a), np.abs(b)
    # mapas idênticos (inclusive constantes) têm correlação 1
    if np.array_equal(a, b):
        return 1.0
    ranks_a = rankdata(a) - (len(a) + 1) / 2.0
    ranks_b = rankdata(b) - (len(b) + 1) / 2.0
    denominator = np.sqrt(np.dot(ranks_a, ranks_a) * np.dot(ranks_b, ranks_b))
    if denominator == 0:
        return 0.0
    return float(np.clip(np.dot(ranks_a, ranks_b) / denominator, -1.0, 1.0))


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """SSIM de janela única sobre o mapa inteiro (L = 1)."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"ssim: formas diferentes {a.shape} e {b.shape}")
    c1 = (0.01 * SSIM_DYNAMIC_RANGE) ** 2
    c2 = (0.03 * SSIM_DYNAMIC_RANGE) ** 2
    mean_a, mean_b = a.mean(), b.mean()
    centred_a, centred_b = a - mean_a, b - mean_b
    var_a = np.dot(centred_a, centred_a) / len(a)
    var_b = np.dot(centred_b, centred_b) / len(b)
    covariance = np.dot(centred_a, centred_b) / len(a)
    numerator = (2 * mean_a * mean_b + c1) * (2 * covariance + c2)
    denominator = (mean_a ** 2 + mean_b ** 2 + c1) * (var_a + var_b + c2)
    return float(numerator / denominator)
