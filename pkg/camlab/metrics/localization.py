"""
Métricas de localização: caixa prevista, OM, LE, F1, SP, EP, SM e BoxAcc.

A caixa prevista vem da maior componente conexa (vizinhança 8) da máscara
binária {S > limiar}. Máscara vazia gera a caixa da imagem inteira.
"""

from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import structlog
from scipy import ndimage

from .boxes import BBox, iou, union_mask

logger = structlog.get_logger(__name__)

DEFAULT_ETAS = tuple(round(0.05 * i, 2) for i in range(1, 20))
DEFAULT_DELTAS = (0.3, 0.5, 0.7)
SM_AREA_FLOOR = 0.05

EIGHT_CONNECTIVITY = np.ones((3, 3), dtype=int)


def largest_component_box(binary: np.ndarray) -> Optional[BBox]:
    """
    Caixa justa da maior componente conexa (vizinhança 8).

    Empates no tamanho vão para a componente cujo primeiro pixel vem antes
    em ordem de varredura. Devolve None para máscara vazia.
    """
    labels, count = ndimage.label(np.asarray(binary, dtype=bool), structure=EIGHT_CONNECTIVITY)
    if count == 0:
        return None
    flat = labels.ravel()
    ids, first, sizes = np.unique(flat, return_index=True, return_counts=True)
    keep = ids != 0
    ids, first, sizes = ids[keep], first[keep], sizes[keep]
    # maior tamanho; depois o menor índice do primeiro pixel
    chosen = ids[np.lexsort((first, -sizes))[0]]
    rows, cols = np.nonzero(labels == chosen)
    return BBox(int(cols.min()), int(rows.min()), int(cols.max()), int(rows.max()))


def threshold_bbox(adapted_map: np.ndarray, threshold: float) -> BBox:
    """Caixa da maior componente de {S > threshold}, ou a imagem inteira se vazia."""
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    box = largest_component_box(adapted_map > threshold)
    return box if box is not None else BBox.full_image(adapted_map.shape)


def predicted_bbox(adapted_map: np.ndarray) -> BBox:
    """Caixa prevista com limiar igual à média do mapa."""
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    return threshold_bbox(adapted_map, float(adapted_map.mean()))


def precision_recall(adapted_map: np.ndarray, gt_boxes: Sequence[BBox]):
    """
    P = Σ_U S / Σ S (0 se a massa total for 0) e R = Σ_U S / |U|.
    """
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    union = union_mask(gt_boxes, adapted_map.shape)
    inside = float((adapted_map * union).sum())
    total = float(adapted_map.sum())
    precision = inside / total if total != 0 else 0.0
    recall = inside / float(union.sum())
    return precision, recall


def energy_pointing(adapted_map: np.ndarray, gt_boxes: Sequence[BBox]) -> float:
    """Fração da massa do mapa dentro das caixas (igual à precisão)."""
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    union = union_mask(gt_boxes, adapted_map.shape)
    total = adapted_map.sum()
    if total == 0:
        return 0.0
    return float(adapted_map[union > 0].sum() / total)


@dataclass(frozen=True)
class LocalizationScores:
    """OM, LE, F1, SP e EP em porcentagem; SM em escala log."""

    OM: float
    LE: float
    F1: float
    SP: float
    EP: float
    SM: float
    precision: float
    recall: float

    def as_dict(self) -> dict:
        return asdict(self)


def localization_suite(adapted_map: np.ndarray, gt_boxes: Sequence[BBox], target_class: int,
                       predicted_class: int, probability: float) -> LocalizationScores:
    """
    Calcula as métricas de localização de um mapa.

    Args:
        adapted_map (np.ndarray): Mapa adaptado (H, W)
        gt_boxes (Sequence[BBox]): Caixas de referência (não vazio)
        target_class (int): Classe verdadeira c
        predicted_class (int): Classe prevista c_p
        probability (float): p^c usado pelo SM

    Returns:
        LocalizationScores: Métricas da imagem

    Raises:
        ValueError: Se não houver caixas de referência
    """
    if len(gt_boxes) == 0:
        raise ValueError("localization_suite: nenhuma caixa de referência")
    adapted_map = np.asarray(adapted_map, dtype=np.float64)
    height, width = adapted_map.shape

    # Caixa prevista e melhor IoU contra as caixas de referência
    box = predicted_bbox(adapted_map)
    best_iou = max(iou(gt, box) for gt in gt_boxes)
    correct = 1.0 if predicted_class == target_class else 0.0

    precision, recall = precision_recall(adapted_map, gt_boxes)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0

    # Acerto se o pixel mais saliente cair dentro de alguma caixa
    union = union_mask(gt_boxes, adapted_map.shape)
    pointing = float(union.ravel()[int(np.argmax(adapted_map))] > 0)

    # Área relativa com piso, menos log p
    saliency_metric = float(np.log(max(SM_AREA_FLOOR, box.area / (height * width))) - np.log(probability))

    return LocalizationScores(
        OM=(1.0 - best_iou * correct) * 100.0,
        LE=(1.0 - best_iou) * 100.0,
        F1=f1 * 100.0,
        SP=pointing * 100.0,
        EP=energy_pointing(adapted_map, gt_boxes) * 100.0,
        SM=saliency_metric,
        precision=precision,
        recall=recall,
    )


def box_hits(adapted_map: np.ndarray, gt_boxes: Sequence[BBox],
             etas: Sequence[float] = DEFAULT_ETAS,
             deltas: Sequence[float] = DEFAULT_DELTAS) -> np.ndarray:
    """Matriz booleana (η, δ): a caixa do limiar η atinge IoU >= δ com alguma caixa."""
    if len(gt_boxes) == 0:
        raise ValueError("box_hits: nenhuma caixa de referência")
    hits = np.zeros((len(etas), len(deltas)), dtype=bool)
    for i, eta in enumerate(etas):
        box = threshold_bbox(adapted_map, eta)
        best = max(iou(gt, box) for gt in gt_boxes)
        hits[i] = [best >= delta for delta in deltas]
    return hits


def box_accuracy_set(maps: Iterable[np.ndarray], gt_boxes: Iterable[Sequence[BBox]],
                     etas: Sequence[float] = DEFAULT_ETAS,
                     deltas: Sequence[float] = DEFAULT_DELTAS) -> float:
    """
    BoxAcc de um conjunto: taxa de acerto por (η, δ) sobre as imagens,
    máximo em η e média em δ, × 100.
    """
    hits = [box_hits(m, b, etas, deltas) for m, b in zip(maps, gt_boxes)]
    if not hits:
        raise ValueError("box_accuracy: nenhum mapa")
    # Taxa por (η, δ); máximo em η, média em δ
    rate = np.mean(np.stack(hits).astype(np.float64), axis=0)
    return float(rate.max(axis=0).mean() * 100.0)


def box_accuracy(adapted_map: np.ndarray, gt_boxes: Sequence[BBox],
                 etas: Sequence[float] = DEFAULT_ETAS,
                 deltas: Sequence[float] = DEFAULT_DELTAS) -> float:
    """BoxAcc de um único mapa."""
    return box_accuracy_set([adapted_map], [gt_boxes], etas, deltas)
