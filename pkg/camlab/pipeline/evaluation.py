"""
Avaliação em lote de um método de atribuição.

Este módulo contém a classe EvaluationRunner que é responsável por:
- Validar a configuração e carregar conjunto e pesos
- Distribuir o trabalho por imagem entre processos (joblib)
- Reduzir os resultados na ordem das imagens
- Gravar per_image.csv, aggregate.json, timing.json e as tabelas opcionais
"""

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import structlog
from joblib import Parallel, delayed

from camlab.extractors.dataset import SyntheticDataset
from camlab.extractors.dataset_reader import DatasetReader
from camlab.loaders.report_writer import ReportWriter
from camlab.loaders.weights_file import load_weights
from camlab.metrics.boxes import BBox
from camlab.metrics.box_study import box_mask_records, box_study_table
from camlab.metrics.classification import EvalRecord, classification_summary, evaluate_mask
from camlab.metrics.insertion_deletion import insertion_deletion, selectivity_sweep
from camlab.metrics.localization import box_hits, localization_suite
from camlab.nn import Network
from camlab.transformers.explainer import SaliencyExplainer

from .config import RunConfig

logger = structlog.get_logger(__name__)

REPORT_FILES = ('per_image.csv', 'aggregate.json', 'timing.json', 'curves.csv',
                'selectivity.csv', 'box_study.csv')


@dataclass
class ImageResult:
    """Resultados de uma imagem."""

    index: int
    image_id: str
    record: EvalRecord
    row: Dict[str, float]
    seconds: float
    curves: Optional[pd.DataFrame] = None
    selectivity: List[dict] = field(default_factory=list)
    box_records: Optional[Dict[str, EvalRecord]] = None
    hits: Optional[np.ndarray] = None


def evaluate_image(network: Network, config: RunConfig, index: int, image_id: str,
                   image: np.ndarray, label: int, boxes: List[BBox]) -> ImageResult:
    """
    Calcula mapa e métricas de uma imagem.

    Função de módulo para poder ser enviada aos processos do joblib.
    """
    started = time.perf_counter()
    metrics = set(config.metrics)
    explainer = SaliencyExplainer(network, config.method, config.layer,
                                  config.opti_config(config.image_seed(index)))

    # Mapa de saliência e resposta à imagem mascarada
    original = network.probabilities(image)
    saliency = explainer.explain(image, label)
    record = evaluate_mask(network, image, saliency.adapted, label, image_id, original)

    row = {
        'image_id': image_id,
        'label': label,
        'predicted': record.predicted_class,
        'p': record.original,
        'o': record.masked,
        'drop': record.drop * 100.0,
        'gain': record.gain * 100.0,
        'increase': float(record.increased) * 100.0,
    }
    result = ImageResult(index=index, image_id=image_id, record=record, row=row, seconds=0.0)

    # Curvas de inserção e remoção
    if 'id' in metrics:
        steps = config.id_steps or image.shape[-1]
        tracked = label if config.id_track_gt else record.predicted_class
        curves = insertion_deletion(network, image, saliency.adapted, steps, tracked)
        row['insertion'] = curves.insertion_score
        row['deletion'] = curves.deletion_score
        result.curves = pd.concat([curves.insertion.to_frame(image_id),
                                   curves.deletion.to_frame(image_id)], ignore_index=True)

    # Métricas de localização contra as caixas da imagem
    if 'loc' in metrics:
        scores = localization_suite(saliency.adapted, boxes, label, record.predicted_class,
                                    record.original)
        row.update({key: value for key, value in scores.as_dict().items()
                    if key not in ('precision', 'recall')})
        result.hits = box_hits(saliency.adapted, boxes, config.box_etas, config.box_deltas)
        row['BoxAcc'] = float(result.hits.any(axis=0).mean() * 100.0)

    if 'sel' in metrics:
        for alpha, swept in selectivity_sweep(network, image, saliency.adapted, label,
                                              config.alphas, image_id):
            result.selectivity.append({'image_id': image_id, 'alpha': alpha, 'p': swept.original,
                                       'o': swept.masked})

    if 'box' in metrics:
        result.box_records = box_mask_records(network, image, boxes, saliency.adapted, label, image_id)

    result.seconds = time.perf_counter() - started
    return result


class EvaluationRunner:
    """
    Classe para orquestrar uma avaliação completa.
    """

    def __init__(self, config: RunConfig):
        """
        Inicializa o orquestrador.

        Args:
            config (RunConfig): Configuração da execução
        """
        self.config = config
        self.network: Optional[Network] = None
        self.dataset: Optional[SyntheticDataset] = None

    def load(self) -> None:
        """Valida a configuração e carrega conjunto e pesos."""
        self.config.validate()
        self.dataset = DatasetReader(self.config.data).extract()
        self.network = load_weights(self.config.weights, class_count=self.dataset.class_count,
                                    input_shape=self.dataset.input_shape)
        self.network.hook_index(self.config.layer)

    def selected_indices(self) -> np.ndarray:
        index = self.dataset.indices(self.config.split)
        if len(index) == 0:
            raise ValueError(f"Partição {self.config.split} sem imagens")
        if self.config.limit is not None:
            index = index[:self.config.limit]
        return index

    def evaluate(self, config: Optional[RunConfig] = None) -> List[ImageResult]:
        """
        Avalia as imagens selecionadas, em paralelo, preservando a ordem.

        Args:
            config (RunConfig, optional): Variante da configuração (mesmos pesos e conjunto)

        Returns:
            List[ImageResult]: Um resultado por imagem, na ordem do conjunto
        """
        config = config or self.config
        if self.network is None:
            self.load()
        config.validate()
        index = self.selected_indices()
        logger.info("Avaliando imagens", method=config.method, images=len(index),
                    workers=config.workers)

        # Um trabalho por imagem; a redução reordena pelo índice
        jobs = (delayed(evaluate_image)(self.network, config, int(i), self.dataset.ids[i],
                                        self.dataset.images[i], int(self.dataset.labels[i]),
                                        self.dataset.boxes[i])
                for i in index)
        results = Parallel(n_jobs=config.workers, backend='loky')(jobs)
        return sorted(results, key=lambda result: result.index)

    @staticmethod
    def aggregate(config: RunConfig, results: List[ImageResult]) -> dict:
        """Métricas agregadas; apenas valores determinísticos."""
        records = [result.record for result in results]
        frame = pd.DataFrame([result.row for result in results])
        metrics = set(config.metrics)
        values = {}
        summary = classification_summary(records)
        for key in ('ad', 'ag', 'ai'):
            if key in metrics:
                values[key.upper()] = summary[key.upper()]
        if 'id' in metrics:
            values['I'] = float(frame['insertion'].mean())
            values['D'] = float(frame['deletion'].mean())
        if 'loc' in metrics:
            for key in ('OM', 'LE', 'F1', 'SP', 'EP', 'SM'):
                values[key] = float(frame[key].mean())
            rate = np.mean(np.stack([result.hits for result in results]).astype(np.float64), axis=0)
            values['BoxAcc'] = float(rate.max(axis=0).mean() * 100.0)

        # drop e gain nunca são positivos ao mesmo tempo
        violations = sum(1 for r in records if r.drop * r.gain != 0)
        return {
            'method': config.method,
            'config': config.echo(),
            'images': len(results),
            'metrics': values,
            'exclusivity_violations': violations,
        }

    def run(self) -> dict:
        """
        Executa a avaliação e grava os relatórios.

        Returns:
            dict: Conteúdo do aggregate.json

        Raises:
            ValueError, FileNotFoundError: Configuração inválida (nada é gravado além de error.json)
        """
        writer = ReportWriter(self.config.output_dir)
        try:
            self.load()
            writer.prepare(REPORT_FILES)
            results = self.evaluate()
            aggregate = self.aggregate(self.config, results)

            writer.write_csv('per_image.csv', pd.DataFrame([result.row for result in results]))
            metrics = set(self.config.metrics)
            if 'id' in metrics:
                writer.write_csv('curves.csv', pd.concat([r.curves for r in results], ignore_index=True))
            if 'sel' in metrics:
                writer.write_csv('selectivity.csv', selectivity_table(results))
            if 'box' in metrics:
                writer.write_csv('box_study.csv', box_study_table([r.box_records for r in results]))
            # Tempos ficam fora do aggregate.json
            writer.write_json('timing.json', {
                'images': len(results),
                'mean_seconds_per_image': float(np.mean([r.seconds for r in results])),
                'seconds_per_image': {r.image_id: r.seconds for r in results},
                'workers': self.config.workers,
            })
            writer.write_json('aggregate.json', aggregate)

            logger.info("Avaliação concluída", method=self.config.method, **aggregate['metrics'])
            return aggregate

        except Exception as e:
            logger.error("Erro durante a avaliação", error=str(e))
            writer.write_error(e, stage='eval')
            raise


def selectivity_table(results: List[ImageResult]) -> pd.DataFrame:
    """AD, AG e AI por expoente α."""
    rows = pd.DataFrame([entry for result in results for entry in result.selectivity])
    table = []
    for alpha, group in rows.groupby('alpha', sort=True):
        records = [EvalRecord(image_id, -1, p, o) for image_id, p, o
                   in zip(group['image_id'], group['p'], group['o'])]
        table.append({'alpha': alpha, **classification_summary(records)})
    return pd.DataFrame(table, columns=['alpha', 'AD', 'AG', 'AI'])


def run_evaluation(config: RunConfig) -> dict:
    """Atalho para EvaluationRunner(config).run()."""
    return EvaluationRunner(config).run()
