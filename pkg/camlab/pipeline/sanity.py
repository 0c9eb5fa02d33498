"""
Teste de randomização de parâmetros.

Para cada estágio s, as últimas s camadas aprendíveis são reinicializadas e
os mapas do método configurado são comparados com os da rede original
(estágio 0) por Spearman (com e sem valor absoluto) e SSIM.
"""

from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
import structlog
from joblib import Parallel, delayed

from camlab.loaders.report_writer import ReportWriter
from camlab.metrics.similarity import spearman_correlation, ssim
from camlab.nn import Network, randomize_from_layer
from camlab.transformers.explainer import SaliencyExplainer

from .config import RunConfig
from .evaluation import EvaluationRunner

logger = structlog.get_logger(__name__)

SANITY_FILE = 'sanity.csv'


def explain_map(network: Network, config: RunConfig, position: int, image: np.ndarray,
                label: int) -> np.ndarray:
    explainer = SaliencyExplainer(network, config.method, config.layer,
                                  config.opti_config(config.image_seed(position)))
    return explainer.explain(image, int(label)).adapted


def explain_images(network: Network, config: RunConfig, positions: Sequence[int],
                   images: np.ndarray, labels: Sequence[int]) -> List[np.ndarray]:
    jobs = (delayed(explain_map)(network, config, int(p), image, label)
            for p, image, label in zip(positions, images, labels))
    return Parallel(n_jobs=config.workers, backend='loky')(jobs)


def sanity_check(config: RunConfig, stages: Sequence[int],
                 runner: Optional[EvaluationRunner] = None) -> pd.DataFrame:
    """
    Mede a similaridade dos mapas ao longo da randomização progressiva.

    Args:
        config (RunConfig): Configuração (método, ponto de captura, partição, limite)
        stages (Sequence[int]): Estágios a avaliar
        runner (EvaluationRunner, optional): Orquestrador já carregado

    Returns:
        pd.DataFrame: stage, spearman, spearman_abs, ssim, images
    """
    try:
        runner = runner or EvaluationRunner(config)
        if runner.network is None:
            runner.load()
        learnable = len(runner.network.learnable_layers)
        for stage in stages:
            if not 0 <= stage <= learnable:
                raise ValueError(f"Estágio {stage} fora de [0, {learnable}]")

        index = runner.selected_indices()
        images = runner.dataset.images[index]
        labels = runner.dataset.labels[index]
        logger.info("Iniciando teste de randomização", method=config.method, stages=list(stages),
                    images=len(index))

        reference = explain_images(runner.network, config, index, images, labels)
        rows = []
        for stage in stages:
            if stage == 0:
                # a rede original comparada consigo mesma
                rows.append({'stage': 0, 'spearman': 1.0, 'spearman_abs': 1.0, 'ssim': 1.0,
                             'images': len(reference)})
                logger.info("Estágio avaliado", **rows[-1])
                continue
            randomized = randomize_from_layer(runner.network, stage, config.seed)
            maps = explain_images(randomized, config, index, images, labels)
            pairs = list(zip(reference, maps))
            rows.append({
                'stage': stage,
                'spearman': float(np.mean([spearman_correlation(a, b) for a, b in pairs])),
                'spearman_abs': float(np.mean([spearman_correlation(a, b, absolute=True)
                                               for a, b in pairs])),
                'ssim': float(np.mean([ssim(a, b) for a, b in pairs])),
                'images': len(maps),
            })
            logger.info("Estágio avaliado", **rows[-1])

        return pd.DataFrame(rows, columns=['stage', 'spearman', 'spearman_abs', 'ssim', 'images'])

    except Exception as e:
        logger.error("Erro durante o teste de randomização", error=str(e))
        raise


def run_sanity(config: RunConfig, stages: Sequence[int]) -> pd.DataFrame:
    """Executa o teste e grava sanity.csv (ou error.json em caso de falha)."""
    writer = ReportWriter(config.output_dir)
    try:
        writer.prepare([SANITY_FILE])
        table = sanity_check(config, stages)
        writer.write_csv(SANITY_FILE, table)
        return table
    except Exception as e:
        writer.write_error(e, stage='sanity')
        raise
