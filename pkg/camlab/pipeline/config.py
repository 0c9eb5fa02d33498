"""
Configuração de uma execução de avaliação.
"""

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from camlab import settings
from camlab.extractors.dataset import SPLITS
from camlab.extractors.dataset_reader import INDEX_FILE
from camlab.metrics.insertion_deletion import DEFAULT_ALPHAS
from camlab.metrics.localization import DEFAULT_DELTAS, DEFAULT_ETAS
from camlab.transformers.explainer import check_method
from camlab.transformers.opti_cam import OptiConfig

METRICS = ('ad', 'ag', 'ai', 'id', 'loc', 'box', 'sel')
DEFAULT_METRICS = ('ad', 'ag', 'ai', 'id', 'loc')


@dataclass(frozen=True)
class RunConfig:
    """
    Parâmetros de uma avaliação.

    Attributes:
        weights (str): Arquivo de pesos OCW1
        data (str): Diretório do conjunto (index.json + PPM)
        method (str): Método de atribuição
        layer (str): Ponto de captura
        objective, normalization, selector, learning_rate, max_iterations,
        tolerance, init: Campos do OptiConfig
        metrics (Tuple[str, ...]): Subconjunto de METRICS
        id_steps (int): Passos de inserção/deleção (0 = lado da imagem)
        id_track_gt (bool): Acompanhar a classe verdadeira em vez da prevista
        box_etas (Tuple[float, ...]): Limiares η do BoxAcc
        box_deltas (Tuple[float, ...]): Limiares δ do BoxAcc
        alphas (Tuple[float, ...]): Expoentes da varredura de seletividade
        split (str): Partição avaliada
        limit (int, optional): Número máximo de imagens
        seed (int): Semente
        workers (int): Processos paralelos
        output_dir (str): Diretório de saída
    """

    weights: str
    data: str
    method: str = 'opti-cam'
    layer: str = settings.LAYER
    objective: str = 'mask'
    normalization: str = 'range'
    selector: str = 'logit'
    learning_rate: float = 0.1
    max_iterations: int = 100
    tolerance: float = 1e-10
    init: str = 'zeros'
    metrics: Tuple[str, ...] = DEFAULT_METRICS
    id_steps: int = settings.ID_STEPS
    id_track_gt: bool = False
    box_etas: Tuple[float, ...] = DEFAULT_ETAS
    box_deltas: Tuple[float, ...] = DEFAULT_DELTAS
    alphas: Tuple[float, ...] = field(default=DEFAULT_ALPHAS)
    split: str = 'test'
    limit: Optional[int] = None
    seed: int = settings.SEED
    workers: int = settings.WORKERS
    output_dir: str = settings.OUTPUT_DIR

    def opti_config(self, seed: Optional[int] = None) -> OptiConfig:
        return OptiConfig(
            objective=self.objective,
            normalization=self.normalization,
            selector=self.selector,
            learning_rate=self.learning_rate,
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            init=self.init,
            seed=self.seed if seed is None else seed,
        )

    def image_seed(self, index: int) -> int:
        """Semente própria de uma imagem, derivada de (seed, índice)."""
        return int(np.random.SeedSequence([self.seed, index]).generate_state(1)[0])

    def validate(self) -> 'RunConfig':
        """
        Verifica a configuração antes de qualquer trabalho.

        Raises:
            ValueError: Parâmetro inválido
            FileNotFoundError: Pesos ou conjunto inexistentes
        """
        check_method(self.method)
        self.opti_config()
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ValueError(f"Métricas desconhecidas: {sorted(unknown)}; disponíveis: {', '.join(METRICS)}")
        if not self.metrics:
            raise ValueError("Nenhuma métrica selecionada")
        if self.id_steps < 0:
            raise ValueError(f"id_steps deve ser >= 0, recebido {self.id_steps}")
        if not self.box_etas or any(not 0 <= eta < 1 for eta in self.box_etas):
            raise ValueError(f"box_etas deve conter valores em [0, 1), recebido {self.box_etas}")
        if not self.box_deltas or any(not 0 < delta <= 1 for delta in self.box_deltas):
            raise ValueError(f"box_deltas deve conter valores em (0, 1], recebido {self.box_deltas}")
        if not self.alphas or any(alpha <= 0 for alpha in self.alphas):
            raise ValueError(f"alphas deve conter valores positivos, recebido {self.alphas}")
        if self.split not in SPLITS:
            raise ValueError(f"Partição desconhecida: {self.split}")
        if self.limit is not None and self.limit < 1:
            raise ValueError(f"limit deve ser positivo, recebido {self.limit}")
        if self.workers < 1:
            raise ValueError(f"workers deve ser >= 1, recebido {self.workers}")
        if not Path(self.weights).is_file():
            raise FileNotFoundError(f"Arquivo de pesos não encontrado: {self.weights}")
        if not (Path(self.data) / INDEX_FILE).is_file():
            raise FileNotFoundError(f"Conjunto não encontrado: {Path(self.data) / INDEX_FILE}")
        return self

    def with_changes(self, **changes) -> 'RunConfig':
        return replace(self, **changes)

    def echo(self) -> dict:
        """Configuração ecoada no relatório; omite o que não altera resultados."""
        document = asdict(self)
        for key in ('workers', 'output_dir'):
            document.pop(key)
        for key in ('metrics', 'box_etas', 'box_deltas', 'alphas'):
            document[key] = list(document[key])
        return document
