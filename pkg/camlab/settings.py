"""
Configurações padrão do camlab lidas do ambiente (e de um .env, se existir).

Flags da linha de comando têm precedência sobre estes valores.
"""

import os

from dotenv import load_dotenv

load_dotenv()

SEED = int(os.getenv('CAMLAB_SEED', '42'))
WORKERS = int(os.getenv('CAMLAB_WORKERS', '1'))
OUTPUT_DIR = os.getenv('CAMLAB_OUTPUT_DIR', 'outputs')
LOG_LEVEL = os.getenv('CAMLAB_LOG_LEVEL', 'INFO')
LAYER = os.getenv('CAMLAB_LAYER', 'feat')
# 0 = lado da imagem
ID_STEPS = int(os.getenv('CAMLAB_ID_STEPS', '0'))
