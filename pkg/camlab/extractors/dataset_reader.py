"""
Leitor de conjuntos de dados gravados em disco.

Este módulo contém a classe DatasetReader que é responsável por:
- Ler o index.json (ids, rótulos, partições e caixas)
- Decodificar as imagens PPM (P6, maxval 255)
- Validar a estrutura do índice e das imagens
- Retornar um SyntheticDataset
"""

import json
from collections import Counter
from pathlib import Path
from typing import Any, Dict, Tuple

import numpy as np
import structlog
from PIL import Image

from camlab.metrics.boxes import BBox

from .dataset import SPLITS, SyntheticDataset

logger = structlog.get_logger(__name__)

INDEX_FILE = 'index.json'


def read_ppm(path: Path) -> np.ndarray:
    """
    Decodifica um PPM binário (P6, maxval 255).

    Returns:
        np.ndarray: Imagem (3, H, W) em [0,1]

    Raises:
        ValueError: Se o arquivo não for um PPM RGB válido ou estiver truncado
    """
    try:
        with Image.open(path) as image:
            if image.format != 'PPM' or image.mode != 'RGB':
                raise ValueError(f"PPM inválido ({image.format}, modo {image.mode}): {path}")
            pixels = np.asarray(image, dtype=np.uint8)
    except (OSError, SyntaxError) as e:
        # UnidentifiedImageError e "image file is truncated" são OSError
        raise ValueError(f"PPM ilegível: {path} ({e})") from None
    return pixels.transpose(2, 0, 1).astype(np.float64) / 255.0


class DatasetReader:
    """
    Classe para extrair um conjunto de imagens de um diretório.
    """

    def __init__(self, directory: str):
        """
        Inicializa o leitor.

        Args:
            directory (str): Diretório com index.json e as imagens PPM
        """
        self.directory = Path(directory)
        self.index_path = self.directory / INDEX_FILE
        self.expected_fields = ['id', 'label', 'split', 'file', 'boxes']

    def _read_index(self) -> Dict[str, Any]:
        if not self.index_path.exists():
            raise FileNotFoundError(f"Índice não encontrado: {self.index_path}")
        with open(self.index_path, encoding='utf-8') as handle:
            return json.load(handle)

    def extract(self) -> SyntheticDataset:
        """
        Lê o conjunto completo.

        Returns:
            SyntheticDataset: Imagens, rótulos, caixas e partições

        Raises:
            FileNotFoundError: Se o índice ou alguma imagem não existir
            ValueError: Se a estrutura for inválida
        """
        try:
            logger.info("Iniciando leitura do conjunto", directory=str(self.directory))
            # Lê e valida o índice
            index = self._read_index()
            self._validate_structure(index)

            # Decodifica as imagens na ordem do índice
            entries = index['images']
            images = []
            for entry in entries:
                path = self.directory / entry['file']
                if not path.exists():
                    raise FileNotFoundError(f"Imagem não encontrada: {path}")
                images.append(read_ppm(path))

            shapes = {image.shape for image in images}
            if len(shapes) != 1:
                raise ValueError(f"Imagens com formas diferentes: {sorted(shapes)}")
            height, width = images[0].shape[1:]

            # Caixas precisam caber na imagem
            boxes = []
            for entry in entries:
                entry_boxes = [BBox(*coords[:4], label=int(entry['label'])) for coords in entry['boxes']]
                if not all(box.fits(height, width) for box in entry_boxes):
                    raise ValueError(f"Caixa fora da imagem em {entry['id']}")
                boxes.append(entry_boxes)

            dataset = SyntheticDataset(
                ids=[str(entry['id']) for entry in entries],
                images=np.stack(images),
                labels=np.array([int(entry['label']) for entry in entries], dtype=np.int64),
                boxes=boxes,
                splits=np.array([entry['split'] for entry in entries], dtype=str),
                class_count=int(index['class_count']),
                seed=int(index.get('seed', 0)),
            )
            logger.info("Leitura do conjunto concluída", images=len(dataset),
                        class_count=dataset.class_count)
            return dataset

        except Exception as e:
            logger.error("Erro durante leitura do conjunto", error=str(e), directory=str(self.directory))
            raise

    def _validate_structure(self, index: Dict[str, Any]) -> None:
        """
        Valida o conteúdo do index.json.

        Raises:
            ValueError: Se a estrutura for inválida
        """
        if 'images' not in index or 'class_count' not in index:
            raise ValueError("index.json sem as chaves 'images' e 'class_count'")
        entries = index['images']
        if not entries:
            raise ValueError("index.json não lista nenhuma imagem")

        # Verifica campos, unicidade dos ids, rótulos e partições
        class_count = int(index['class_count'])
        ids = set()
        for entry in entries:
            missing = set(self.expected_fields) - set(entry)
            if missing:
                raise ValueError(f"Campos ausentes no índice: {sorted(missing)}")
            if entry['id'] in ids:
                raise ValueError(f"Identificador repetido: {entry['id']}")
            ids.add(entry['id'])
            if not 0 <= int(entry['label']) < class_count:
                raise ValueError(f"Rótulo {entry['label']} fora de [0, {class_count}) em {entry['id']}")
            if entry['split'] not in SPLITS:
                raise ValueError(f"Partição desconhecida {entry['split']} em {entry['id']}")
            if not entry['boxes']:
                raise ValueError(f"Imagem {entry['id']} sem caixa de referência")

        logger.info("Estrutura do índice validada com sucesso", images=len(entries))

    def get_metadata(self) -> Dict[str, Any]:
        """
        Retorna metadados do conjunto sem decodificar as imagens.

        Returns:
            Dict[str, Any]: Histograma de classes, tamanhos das partições e tamanho das imagens
        """
        try:
            index = self._read_index()
            self._validate_structure(index)
            entries = index['images']
            metadata = {
                'directory': str(self.directory),
                'images': len(entries),
                'class_count': int(index['class_count']),
                'seed': index.get('seed'),
                'image_size': index.get('image_size'),
                'class_histogram': {str(k): v for k, v in
                                    sorted(Counter(int(e['label']) for e in entries).items())},
                'split_sizes': {split: sum(1 for e in entries if e['split'] == split)
                                for split in SPLITS},
            }
            logger.info("Metadados do conjunto obtidos", metadata=metadata)
            return metadata

        except Exception as e:
            logger.error("Erro ao obter metadados do conjunto", error=str(e))
            return {"error": str(e)}


def read_dataset(directory: str) -> SyntheticDataset:
    """Atalho para DatasetReader(directory).extract()."""
    return DatasetReader(directory).extract()
