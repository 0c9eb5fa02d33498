"""
Gravador de conjuntos de dados.

Este módulo contém a classe DatasetWriter que é responsável por:
- Gravar cada imagem como PPM (P6)
- Gravar o index.json com ids, rótulos, partições e caixas
- Gravar o índice por último, de modo que um diretório com index.json está completo
"""

import json
from pathlib import Path
from typing import Any, Dict

import structlog

from camlab.extractors.dataset import SyntheticDataset
from camlab.extractors.dataset_reader import INDEX_FILE

from .files import atomic_write_bytes, atomic_write_text
from .netpbm import encode_ppm

logger = structlog.get_logger(__name__)


class DatasetWriter:
    """
    Classe para gravar um SyntheticDataset em disco.
    """

    def __init__(self, directory: str):
        """
        Inicializa o gravador.

        Args:
            directory (str): Diretório de destino (criado se necessário)
        """
        self.directory = Path(directory)

    def write(self, dataset: SyntheticDataset) -> Dict[str, Any]:
        """
        Grava imagens e índice.

        Args:
            dataset (SyntheticDataset): Conjunto a gravar

        Returns:
            Dict[str, Any]: Relatório da gravação
        """
        try:
            logger.info("Iniciando gravação do conjunto", directory=str(self.directory),
                        images=len(dataset))
            self.directory.mkdir(parents=True, exist_ok=True)
            (self.directory / 'images').mkdir(exist_ok=True)

            entries = []
            for position, image_id in enumerate(dataset.ids):
                relative = f"images/{image_id}.ppm"
                atomic_write_bytes(self.directory / relative, encode_ppm(dataset.images[position]))
                entries.append({
                    'id': image_id,
                    'label': int(dataset.labels[position]),
                    'split': str(dataset.splits[position]),
                    'file': relative,
                    'boxes': [box.as_list() for box in dataset.boxes[position]],
                })

            index = {
                'seed': int(dataset.seed),
                'class_count': int(dataset.class_count),
                'image_size': list(dataset.input_shape[1:]),
                'images': entries,
            }
            atomic_write_text(self.directory / INDEX_FILE, json.dumps(index, indent=2) + "\n")

            report = {'directory': str(self.directory), 'images_written': len(entries)}
            logger.info("Gravação do conjunto concluída", **report)
            return report

        except Exception as e:
            logger.error("Erro durante gravação do conjunto", error=str(e),
                         directory=str(self.directory))
            raise


def write_dataset(dataset: SyntheticDataset, directory: str) -> Dict[str, Any]:
    """Atalho para DatasetWriter(directory).write(dataset)."""
    return DatasetWriter(directory).write(dataset)
