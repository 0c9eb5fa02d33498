"""
Ponto único de despacho dos métodos de atribuição.

Este módulo contém a classe SaliencyExplainer, que associa o nome de um
método à função correspondente e guarda a rede, o ponto de captura e os
parâmetros do Opti-CAM usados em todas as chamadas.
"""

from typing import Optional

import numpy as np
import pandas as pd
import structlog

from camlab.nn import DEFAULT_LAYER, Network

from .cam_methods import (SaliencyMap, ablation_cam, cam, fake_cam, grad_cam, grad_cam_pp,
                          score_cam, xgrad_cam)
from .opti_cam import OptiConfig, opti_cam

logger = structlog.get_logger(__name__)

CAM_METHODS = {
    'cam': cam,
    'grad-cam': grad_cam,
    'grad-cam++': grad_cam_pp,
    'xgrad-cam': xgrad_cam,
    'score-cam': score_cam,
    'ablation-cam': ablation_cam,
}

METHODS = tuple(CAM_METHODS) + ('fake-cam', 'opti-cam')


def check_method(method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"Método desconhecido: {method}; disponíveis: {', '.join(METHODS)}")
    return method


class SaliencyExplainer:
    """
    Classe para calcular mapas de saliência com um método configurado.
    """

    def __init__(self, network: Network, method: str, layer: str = DEFAULT_LAYER,
                 opti_config: Optional[OptiConfig] = None):
        """
        Inicializa o explicador.

        Args:
            network (Network): Classificador
            method (str): Um dos nomes em METHODS
            layer (str): Ponto de captura
            opti_config (OptiConfig, optional): Parâmetros do Opti-CAM

        Raises:
            ValueError: Se o método ou o ponto de captura forem desconhecidos
        """
        self.network = network
        self.method = check_method(method)
        network.hook_index(layer)
        self.layer = layer
        self.opti_config = opti_config or OptiConfig()
        self.last_trace: Optional[pd.DataFrame] = None

    def explain(self, image: np.ndarray, target_class: int) -> SaliencyMap:
        """
        Calcula o mapa de saliência de uma imagem para a classe informada.

        Args:
            image (np.ndarray): Imagem (C, H, W) em [0,1]
            target_class (int): Classe c

        Returns:
            SaliencyMap: Mapa bruto e adaptado
        """
        if self.method == 'fake-cam':
            return fake_cam(np.shape(image), target_class)
        if self.method == 'opti-cam':
            saliency, self.last_trace = opti_cam(self.network, image, target_class, self.layer,
                                                 self.opti_config)
            return saliency
        return CAM_METHODS[self.method](self.network, image, target_class, self.layer)


def compute_saliency(network: Network, image: np.ndarray, target_class: int, method: str,
                     layer: str = DEFAULT_LAYER, opti_config: Optional[OptiConfig] = None) -> SaliencyMap:
    """Atalho para SaliencyExplainer(...).explain(image, target_class)."""
    return SaliencyExplainer(network, method, layer, opti_config).explain(image, target_class)
