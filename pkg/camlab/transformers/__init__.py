"""
Métodos de atribuição: família CAM, Fake-CAM e Opti-CAM.
"""

from .cam_methods import (SaliencyMap, ablation_cam, cam, fake_cam, grad_cam, grad_cam_pp,
                          score_cam, xgrad_cam)
from .explainer import METHODS, SaliencyExplainer, check_method, compute_saliency
from .masking import Normalization, adapt_saliency, apply_mask
from .opti_cam import Init, Objective, OptiConfig, Selector, opti_cam

__all__ = [
    'SaliencyMap', 'cam', 'grad_cam', 'grad_cam_pp', 'xgrad_cam', 'score_cam', 'ablation_cam',
    'fake_cam', 'METHODS', 'SaliencyExplainer', 'check_method', 'compute_saliency',
    'Normalization', 'adapt_saliency', 'apply_mask',
    'Init', 'Objective', 'OptiConfig', 'Selector', 'opti_cam',
]
