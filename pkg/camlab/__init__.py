"""
Pacote camlab: mapas de saliência por combinação de mapas de ativação.

Este pacote contém todos os componentes necessários para:
- Diferenciação automática em modo reverso sobre tensores densos (float64)
- Definição, treino e serialização de uma CNN de brinquedo
- Métodos de atribuição da família CAM e Opti-CAM
- Métricas de avaliação (AD/AG/AI, inserção/remoção, localização, sanidade)
- Orquestração de experimentos e interface de linha de comando
"""

__version__ = "1.0.0"
__author__ = "camlab Team"
