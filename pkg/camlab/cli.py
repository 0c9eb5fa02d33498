"""
Interface de linha de comando do camlab.

Subcomandos: gen-data, train, explain, eval, sanity, ablate.

Em caso de erro, uma única linha "error type=<Classe> message=\"...\"" é
escrita em stderr e o código de saída é 1.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from camlab import settings
from camlab.extractors import DatasetReader, generate_synthetic_dataset
from camlab.loaders import export_saliency, load_weights, save_weights, write_dataset
from camlab.loaders.files import atomic_write_text
from camlab.logging_config import configure_logging
from camlab.metrics.insertion_deletion import DEFAULT_ALPHAS
from camlab.metrics.localization import DEFAULT_DELTAS, DEFAULT_ETAS
from camlab.nn import TrainConfig, build_toy_cnn, train
from camlab.pipeline import DEFAULT_METRICS, RunConfig, run_ablations, run_evaluation, run_sanity
from camlab.pipeline.ablation import NORMALIZATIONS, OBJECTIVES
from camlab.transformers import METHODS, SaliencyExplainer

logger = structlog.get_logger(__name__)


def _floats(text: str) -> tuple:
    return tuple(float(value) for value in text.split(',') if value.strip())


def _ints(text: str) -> tuple:
    return tuple(int(value) for value in text.split(',') if value.strip())


def _names(text: str) -> tuple:
    return tuple(value.strip() for value in text.split(',') if value.strip())


def _emit(document: dict) -> None:
    print(json.dumps(document, sort_keys=True))


def _add_opti_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--objective', default='mask', help='mask, diff, iomask ou iodiff')
    parser.add_argument('--norm', default='range', help='range, max ou sigmoid')
    parser.add_argument('--selector', default='logit', help='logit ou probability')
    parser.add_argument('--lr', type=float, default=0.1, help='Taxa de aprendizado do Adam')
    parser.add_argument('--iters', type=int, default=100, help='Limite de iterações')
    parser.add_argument('--tol', type=float, default=1e-10, help='Tolerância da parada antecipada')
    parser.add_argument('--init', default='zeros', help='zeros, gradcam ou random')


def _add_run_arguments(parser: argparse.ArgumentParser, method: bool = True) -> None:
    parser.add_argument('--weights', required=True, help='Arquivo de pesos OCW1')
    parser.add_argument('--data', required=True, help='Diretório do conjunto')
    if method:
        parser.add_argument('--method', default='opti-cam', choices=METHODS)
    parser.add_argument('--layer', default=settings.LAYER, help='Ponto de captura')
    parser.add_argument('--split', default='test', help='Partição avaliada')
    parser.add_argument('--limit', type=int, help='Número máximo de imagens')
    parser.add_argument('--seed', type=int, default=settings.SEED)
    parser.add_argument('--workers', type=int, default=settings.WORKERS)
    parser.add_argument('--out', default=settings.OUTPUT_DIR, help='Diretório de saída')
    _add_opti_arguments(parser)


def _run_config(args: argparse.Namespace, **overrides) -> RunConfig:
    values = dict(
        weights=args.weights,
        data=args.data,
        method=getattr(args, 'method', 'opti-cam'),
        layer=args.layer,
        objective=args.objective,
        normalization=args.norm,
        selector=args.selector,
        learning_rate=args.lr,
        max_iterations=args.iters,
        tolerance=args.tol,
        init=args.init,
        split=args.split,
        limit=args.limit,
        seed=args.seed,
        workers=args.workers,
        output_dir=args.out,
    )
    values.update(overrides)
    return RunConfig(**values).validate()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='camlab',
                                     description='Mapas de saliência Opti-CAM e família CAM com avaliação',
                                     epilog=('eval grava os tempos por imagem em timing.json no diretório de saída; '
                                             'aggregate.json e per_image.csv contêm apenas valores determinísticos.'))
    parser.add_argument('--log-level', default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen-data', help='Gera o conjunto sintético')
    gen.add_argument('--seed', type=int, default=settings.SEED)
    gen.add_argument('--n', type=int, default=300, help='Imagens por classe')
    gen.add_argument('--size', type=int, default=32, help='Lado das imagens')
    gen.add_argument('--classes', type=int, default=3)
    gen.add_argument('--out', required=True, help='Diretório de destino')

    training = sub.add_parser('train', help='Treina a CNN de brinquedo')
    training.add_argument('--data', required=True)
    training.add_argument('--epochs', type=int, default=20)
    training.add_argument('--batch-size', type=int, default=16)
    training.add_argument('--lr', type=float, default=0.05)
    training.add_argument('--momentum', type=float, default=0.9)
    training.add_argument('--seed', type=int, default=settings.SEED)
    training.add_argument('--out', required=True, help='Arquivo de pesos de destino')

    explain = sub.add_parser('explain', help='Calcula o mapa de uma imagem')
    explain.add_argument('--weights', required=True)
    explain.add_argument('--data', required=True)
    explain.add_argument('--image-id', required=True)
    explain.add_argument('--method', default='opti-cam', choices=METHODS)
    explain.add_argument('--class', dest='target_class', type=int,
                         help='Classe explicada (padrão: rótulo da imagem)')
    explain.add_argument('--layer', default=settings.LAYER)
    explain.add_argument('--seed', type=int, default=settings.SEED)
    explain.add_argument('--out', required=True, help='Arquivo SALV1 de destino')
    _add_opti_arguments(explain)

    evaluate = sub.add_parser('eval', help='Avalia um método em uma partição',
                              epilog='Tempos por imagem vão para timing.json, fora do aggregate.json.')
    _add_run_arguments(evaluate)
    evaluate.add_argument('--metrics', default=','.join(DEFAULT_METRICS),
                          help='Lista: ad,ag,ai,id,loc,box,sel')
    evaluate.add_argument('--id-steps', type=int, default=settings.ID_STEPS)
    evaluate.add_argument('--id-track-gt', action='store_true',
                          help='Inserção/deleção acompanham a classe verdadeira')
    evaluate.add_argument('--box-eta', default=','.join(str(v) for v in DEFAULT_ETAS))
    evaluate.add_argument('--box-delta', default=','.join(str(v) for v in DEFAULT_DELTAS))
    evaluate.add_argument('--alphas', default=','.join(str(v) for v in DEFAULT_ALPHAS))

    sanity = sub.add_parser('sanity', help='Teste de randomização de parâmetros')
    _add_run_arguments(sanity)
    sanity.add_argument('--stages', default='0,1,2,3')

    ablate = sub.add_parser('ablate', help='Ablações do Opti-CAM')
    _add_run_arguments(ablate, method=False)
    ablate.add_argument('--objectives', default=','.join(OBJECTIVES))
    ablate.add_argument('--norms', default=','.join(NORMALIZATIONS))
    ablate.add_argument('--layers', default='', help='Pontos de captura (padrão: todos)')
    ablate.add_argument('--lrs', default='', help='Taxas do estudo de convergência')
    ablate.add_argument('--iters-grid', default='', help='Limites de iterações do estudo de convergência')
    return parser


def command_gen_data(args: argparse.Namespace) -> None:
    dataset = generate_synthetic_dataset(args.seed, args.n, args.size, args.classes)
    _emit(write_dataset(dataset, args.out))


def command_train(args: argparse.Namespace) -> None:
    dataset = DatasetReader(args.data).extract()
    network = build_toy_cnn(dataset.class_count, dataset.input_shape, args.seed)
    config = TrainConfig(epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr,
                         momentum=args.momentum, seed=args.seed)
    trained, accuracy = train(network, dataset, config)
    report = save_weights(trained, args.out)
    _emit({**report, 'accuracy': accuracy})


def command_explain(args: argparse.Namespace) -> None:
    dataset = DatasetReader(args.data).extract()
    network = load_weights(args.weights, class_count=dataset.class_count,
                           input_shape=dataset.input_shape)
    position = dataset.position(args.image_id)
    target = int(dataset.labels[position]) if args.target_class is None else args.target_class
    config = RunConfig(weights=args.weights, data=args.data, method=args.method, layer=args.layer,
                       objective=args.objective, normalization=args.norm, selector=args.selector,
                       learning_rate=args.lr, max_iterations=args.iters, tolerance=args.tol,
                       init=args.init, seed=args.seed)
    explainer = SaliencyExplainer(network, args.method, args.layer,
                                  config.opti_config(config.image_seed(position)))
    saliency = explainer.explain(dataset.images[position], target)
    written = export_saliency(saliency, args.out)
    if explainer.last_trace is not None:
        trace_path = Path(args.out).with_suffix('.trace.csv')
        atomic_write_text(trace_path, explainer.last_trace.to_csv(index=False))
        written['trace'] = str(trace_path)
    _emit({**written, 'image_id': args.image_id, 'method': args.method, 'target_class': target})


def command_eval(args: argparse.Namespace) -> None:
    config = _run_config(args, metrics=_names(args.metrics), id_steps=args.id_steps,
                         id_track_gt=args.id_track_gt, box_etas=_floats(args.box_eta),
                         box_deltas=_floats(args.box_delta), alphas=_floats(args.alphas))
    aggregate = run_evaluation(config)
    _emit({'output_dir': config.output_dir, 'metrics': aggregate['metrics']})


def command_sanity(args: argparse.Namespace) -> None:
    config = _run_config(args)
    table = run_sanity(config, _ints(args.stages))
    _emit({'output_dir': config.output_dir, 'rows': table.to_dict(orient='records')})


def command_ablate(args: argparse.Namespace) -> None:
    config = _run_config(args)
    tables = run_ablations(config, _names(args.objectives), _names(args.norms),
                           _names(args.layers) or None, _floats(args.lrs), _ints(args.iters_grid))
    _emit({'output_dir': config.output_dir, 'tables': sorted(tables)})


COMMANDS = {
    'gen-data': command_gen_data,
    'train': command_train,
    'explain': command_explain,
    'eval': command_eval,
    'sanity': command_sanity,
    'ablate': command_ablate,
}


def format_error(error: BaseException) -> str:
    message = str(error).replace('\\', '\\\\').replace('"', '\\"').replace('\n', ' ')
    return f'error type={type(error).__name__} message="{message}"'


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal; devolve o código de saída."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        COMMANDS[args.command](args)
        return 0
    except Exception as e:
        logger.error("Comando falhou", command=args.command, error=str(e))
        print(format_error(e), file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
