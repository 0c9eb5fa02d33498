"""
Módulo de métricas do camlab.

Este módulo contém:
- classification: AD, AG e AI sobre registros de mascaramento
- insertion_deletion: curvas de inserção/deleção e seletividade
- localization: caixa prevista, OM/LE/F1/SP/EP/SM e BoxAcc
- similarity: Spearman e SSIM
- box_study: mascaramento por caixa, mapa e combinações
"""

from .boxes import BBox, iou, union_mask
from .classification import (EvalRecord, average_drop, average_gain, average_increase,
                             classification_summary, evaluate_mask)
from .insertion_deletion import (DEFAULT_ALPHAS, Curve, InsertionDeletionResult, gaussian_blur,
                                 insertion_deletion, selectivity_sweep)
from .localization import (DEFAULT_DELTAS, DEFAULT_ETAS, LocalizationScores, box_accuracy,
                           box_accuracy_set, localization_suite, predicted_bbox)
from .similarity import spearman_correlation, ssim
from .box_study import BOX_VARIANTS, box_mask_records, box_study_table

__all__ = [
    'BBox', 'iou', 'union_mask',
    'EvalRecord', 'average_drop', 'average_gain', 'average_increase', 'classification_summary',
    'evaluate_mask',
    'DEFAULT_ALPHAS', 'Curve', 'InsertionDeletionResult', 'gaussian_blur', 'insertion_deletion',
    'selectivity_sweep',
    'DEFAULT_DELTAS', 'DEFAULT_ETAS', 'LocalizationScores', 'box_accuracy', 'box_accuracy_set',
    'localization_suite', 'predicted_bbox',
    'spearman_correlation', 'ssim',
    'BOX_VARIANTS', 'box_mask_records', 'box_study_table',
]
