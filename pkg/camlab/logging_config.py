"""
Configuração do logging estruturado (JSON em stderr).
"""

import logging
import sys

import structlog


def configure_logging(level: str = 'INFO') -> None:
    """
    Configura structlog sobre o logging padrão.

    Args:
        level (str): Nível mínimo (DEBUG, INFO, WARNING, ERROR)
    """
    logging.basicConfig(format="%(message)s", stream=sys.stderr,
                        level=getattr(logging, str(level).upper(), logging.INFO), force=True)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer()
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
