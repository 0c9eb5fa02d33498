"""
Estudo com caixas de referência: mascaramento pelo mapa, pela caixa e
pelas combinações entre eles.

Variantes (B = união das caixas, I = imagem inteira):
- S: o próprio mapa
- B_and_S: min(S, 1_B)
- S_minus_B: min(S, 1_{I∖B})
- B: indicador da caixa
- I_minus_B: indicador do complemento
"""

from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from .boxes import BBox, union_mask
from .classification import EvalRecord, classification_summary, evaluate_mask

BOX_VARIANTS = ('S', 'B_and_S', 'S_minus_B', 'B', 'I_minus_B')


def box_masks(adapted_map: np.ndarray, gt_boxes: Sequence[BBox]) -> Dict[str, np.ndarray]:
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    inside = union_mask(gt_boxes, adapted_map.shape)
    outside = 1.0 - inside
    return {
        'S': adapted_map,
        'B_and_S': np.minimum(adapted_map, inside),
        'S_minus_B': np.minimum(adapted_map, outside),
        'B': inside,
        'I_minus_B': outside,
    }


def box_mask_records(network, image: np.ndarray, gt_boxes: Sequence[BBox],
                     adapted_map: np.ndarray, target_class: int,
                     image_id: str = '') -> Dict[str, EvalRecord]:
    """
    Registros (p, o) de uma imagem para as cinco máscaras.

    Raises:
        ValueError: Se não houver caixas
    """
    if len(gt_boxes) == 0:
        raise ValueError("box_mask_records: nenhuma caixa de referência")
    original = network.probabilities(image)
    return {variant: evaluate_mask(network, image, mask, target_class, image_id, original)
            for variant, mask in box_masks(adapted_map, gt_boxes).items()}


def box_study_table(per_image: Sequence[Dict[str, EvalRecord]]) -> pd.DataFrame:
    """AD, AG e AI por variante, uma linha por variante na ordem de BOX_VARIANTS."""
    rows: List[dict] = []
    for variant in BOX_VARIANTS:
        records = [entry[variant] for entry in per_image]
        rows.append({'variant': variant, **classification_summary(records)})
    return pd.DataFrame(rows, columns=['variant', 'AD', 'AG', 'AI'])
