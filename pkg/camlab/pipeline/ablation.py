"""
Estudos de ablação do Opti-CAM.

- ablation_grid: objetivo x normalização
- layer_ablation: um ponto de captura por linha
- convergence_study: taxa de aprendizado x limite de iterações

Cada célula reutiliza o EvaluationRunner com a configuração alterada e
produz uma linha com AD, AG e AI.
"""

from itertools import product
from typing import Optional, Sequence

import pandas as pd
import structlog

from camlab.loaders.report_writer import ReportWriter
from camlab.metrics.classification import classification_summary
from camlab.transformers.masking import Normalization
from camlab.transformers.opti_cam import Objective

from .config import RunConfig
from .evaluation import EvaluationRunner

logger = structlog.get_logger(__name__)

ABLATION_FILE = 'ablation.csv'
LAYER_FILE = 'layer_ablation.csv'
CONVERGENCE_FILE = 'convergence.csv'

OBJECTIVES = tuple(objective.value for objective in Objective)
NORMALIZATIONS = tuple(normalization.value for normalization in Normalization)


def _cell(runner: EvaluationRunner, config: RunConfig) -> dict:
    results = runner.evaluate(config)
    return classification_summary([result.record for result in results])


def _runner(config: RunConfig, runner: Optional[EvaluationRunner]) -> EvaluationRunner:
    runner = runner or EvaluationRunner(config)
    if runner.network is None:
        runner.load()
    return runner


def _base(config: RunConfig) -> RunConfig:
    return config.with_changes(method='opti-cam', metrics=('ad', 'ag', 'ai'))


def ablation_grid(config: RunConfig, objectives: Sequence[str] = OBJECTIVES,
                  normalizations: Sequence[str] = NORMALIZATIONS,
                  runner: Optional[EvaluationRunner] = None) -> pd.DataFrame:
    """
    AD/AG/AI do Opti-CAM para cada par (objetivo, normalização).

    Returns:
        pd.DataFrame: objective, normalization, AD, AG, AI (uma linha por par)
    """
    try:
        runner = _runner(config, runner)
        base = _base(config)
        rows = []
        for objective, normalization in product(objectives, normalizations):
            cell = base.with_changes(objective=objective, normalization=normalization)
            rows.append({'objective': objective, 'normalization': normalization,
                         **_cell(runner, cell)})
            logger.info("Célula da ablação avaliada", **rows[-1])
        return pd.DataFrame(rows, columns=['objective', 'normalization', 'AD', 'AG', 'AI'])
    except Exception as e:
        logger.error("Erro durante a ablação", error=str(e))
        raise


def layer_ablation(config: RunConfig, layers: Optional[Sequence[str]] = None,
                   runner: Optional[EvaluationRunner] = None) -> pd.DataFrame:
    """
    AD/AG/AI do método configurado em cada ponto de captura.

    Returns:
        pd.DataFrame: layer, AD, AG, AI
    """
    try:
        runner = _runner(config, runner)
        layers = layers or runner.network.hook_names
        base = config.with_changes(metrics=('ad', 'ag', 'ai'))
        rows = []
        for layer in layers:
            rows.append({'layer': layer, **_cell(runner, base.with_changes(layer=layer))})
            logger.info("Ponto de captura avaliado", **rows[-1])
        return pd.DataFrame(rows, columns=['layer', 'AD', 'AG', 'AI'])
    except Exception as e:
        logger.error("Erro durante a ablação de camadas", error=str(e))
        raise


def convergence_study(config: RunConfig, learning_rates: Sequence[float],
                      iteration_caps: Sequence[int],
                      runner: Optional[EvaluationRunner] = None) -> pd.DataFrame:
    """
    AD/AG/AI do Opti-CAM para cada par (taxa de aprendizado, limite de iterações).

    Returns:
        pd.DataFrame: learning_rate, max_iterations, AD, AG, AI
    """
    try:
        runner = _runner(config, runner)
        base = _base(config)
        rows = []
        for learning_rate, iterations in product(learning_rates, iteration_caps):
            cell = base.with_changes(learning_rate=float(learning_rate), max_iterations=int(iterations))
            rows.append({'learning_rate': float(learning_rate), 'max_iterations': int(iterations),
                         **_cell(runner, cell)})
            logger.info("Célula de convergência avaliada", **rows[-1])
        return pd.DataFrame(rows, columns=['learning_rate', 'max_iterations', 'AD', 'AG', 'AI'])
    except Exception as e:
        logger.error("Erro durante o estudo de convergência", error=str(e))
        raise


def run_ablations(config: RunConfig, objectives: Sequence[str] = OBJECTIVES,
                  normalizations: Sequence[str] = NORMALIZATIONS,
                  layers: Optional[Sequence[str]] = None,
                  learning_rates: Sequence[float] = (),
                  iteration_caps: Sequence[int] = ()) -> dict:
    """
    Executa a grade objetivo x normalização, a ablação de camadas e, se
    pedidas, as células de convergência; grava um CSV por estudo.
    """
    writer = ReportWriter(config.output_dir)
    try:
        writer.prepare([ABLATION_FILE, LAYER_FILE, CONVERGENCE_FILE])
        runner = _runner(config, None)
        tables = {
            ABLATION_FILE: ablation_grid(config, objectives, normalizations, runner),
            LAYER_FILE: layer_ablation(config, layers, runner),
        }
        if learning_rates and iteration_caps:
            tables[CONVERGENCE_FILE] = convergence_study(config, learning_rates, iteration_caps, runner)
        for name, table in tables.items():
            writer.write_csv(name, table)
        return tables
    except Exception as e:
        writer.write_error(e, stage='ablate')
        raise
