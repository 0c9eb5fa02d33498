"""
Gravador de relatórios de avaliação.

Este módulo contém a classe ReportWriter que é responsável por:
- Gravar tabelas CSV e documentos JSON de forma atômica
- Remover relatórios antigos antes de uma nova execução
- Gravar error.json quando a execução falha
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable

import pandas as pd
import structlog

from .files import atomic_write_text

logger = structlog.get_logger(__name__)

ERROR_FILE = 'error.json'


class ReportWriter:
    """
    Classe para gravar os relatórios de uma execução em um diretório.
    """

    def __init__(self, directory: str):
        """
        Inicializa o gravador.

        Args:
            directory (str): Diretório de saída (criado se necessário)
        """
        self.directory = Path(directory)
        self.written = []

    def prepare(self, names: Iterable[str]) -> None:
        """Cria o diretório e remove relatórios antigos com os nomes informados e o error.json."""
        self.directory.mkdir(parents=True, exist_ok=True)
        for name in list(names) + [ERROR_FILE]:
            target = self.directory / name
            if target.exists():
                target.unlink()

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = atomic_write_text(self.directory / name, frame.to_csv(index=False))
        self.written.append(str(path))
        logger.info("Relatório CSV gravado", path=str(path), rows=len(frame))
        return path

    def write_json(self, name: str, document: Dict[str, Any]) -> Path:
        text = json.dumps(document, indent=2, sort_keys=True, allow_nan=True) + "\n"
        path = atomic_write_text(self.directory / name, text)
        self.written.append(str(path))
        logger.info("Relatório JSON gravado", path=str(path))
        return path

    def write_error(self, error: BaseException, stage: str = '') -> Path:
        """Grava error.json com o tipo e a mensagem do erro."""
        self.directory.mkdir(parents=True, exist_ok=True)
        document = {'error': type(error).__name__, 'message': str(error), 'stage': stage}
        path = atomic_write_text(self.directory / ERROR_FILE,
                                 json.dumps(document, indent=2, sort_keys=True) + "\n")
        logger.error("Execução interrompida; error.json gravado", path=str(path),
                     error=str(error))
        return path
