"""
Módulo de extratores de dados do camlab.

Este módulo contém classes e funções para obter conjuntos de imagens:
- Geração determinística de imagens sintéticas com caixas
- Leitura de conjuntos gravados em disco (index.json + PPM)
"""

from .dataset import SPLITS, SyntheticDataset
from .dataset_reader import DatasetReader, read_dataset, read_ppm
from .synthetic_generator import generate_synthetic_dataset

__all__ = ['SPLITS', 'SyntheticDataset', 'DatasetReader', 'read_dataset', 'read_ppm',
           'generate_synthetic_dataset']
