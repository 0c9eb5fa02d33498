"""
Módulo de carregadores do camlab.

Este módulo contém classes e funções para persistir resultados:
- Pesos da rede (formato OCW1)
- Conjuntos de imagens (index.json + PPM)
- Mapas de saliência (SALV1 + PGM)
- Relatórios CSV/JSON gravados de forma atômica
"""

from .dataset_writer import DatasetWriter, write_dataset
from .report_writer import ERROR_FILE, ReportWriter
from .saliency_file import export_saliency, import_saliency
from .weights_file import load_weights, save_weights, serialize_network

__all__ = ['DatasetWriter', 'write_dataset', 'ERROR_FILE', 'ReportWriter', 'export_saliency',
           'import_saliency', 'load_weights', 'save_weights', 'serialize_network']
