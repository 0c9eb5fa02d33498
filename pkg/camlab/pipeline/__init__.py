"""
Orquestração das execuções do camlab: avaliação, teste de randomização e ablações.
"""

from .config import DEFAULT_METRICS, METRICS, RunConfig
from .evaluation import EvaluationRunner, run_evaluation
from .sanity import run_sanity, sanity_check
from .ablation import (ablation_grid, convergence_study, layer_ablation, run_ablations)

__all__ = ['DEFAULT_METRICS', 'METRICS', 'RunConfig', 'EvaluationRunner', 'run_evaluation',
           'run_sanity', 'sanity_check', 'ablation_grid', 'convergence_study', 'layer_ablation',
           'run_ablations']
