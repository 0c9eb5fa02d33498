#!/usr/bin/env python3
"""
Script principal do camlab.

Exemplos:
    run_camlab.py gen-data --seed 42 --n 300 --size 32 --classes 3 --out data/shapes
    run_camlab.py train --data data/shapes --epochs 20 --out outputs/toy.ocw
    run_camlab.py eval --weights outputs/toy.ocw --data data/shapes --method opti-cam --out outputs/eval
"""

import sys
from pathlib import Path

# Adiciona o diretório raiz ao path para importar o pacote
sys.path.append(str(Path(__file__).parent.parent))

from camlab.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
