import argparse
from pathlib import Path
import sys

from rankshift.config import Config
from rankshift.detector import Detector
from rankshift.errors import ConfigError
from rankshift.helpers import print_warning
from rankshift.version import __version__


def _is_file_path(path):
    p = Path(path)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f'{path} is not a valid file path')
    return p


def _int_list(string):
    try:
        values = [int(x) for x in string.split(',') if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'{string} is not a comma separated list of integers')
    if not values:
        raise argparse.ArgumentTypeError('at least one value is required')
    return values


def _add_run_arguments(parser):
    """Flags shared by the commands that score a stream."""
    parser.add_argument('--damping', type=float, help='damping factor c of the random walk (default 0.5)')
    parser.add_argument('--epsilon', type=float, help='L1 convergence threshold of the solvers (default 1e-3)')
    parser.add_argument('--max-iters', type=int, help='iteration limit of the solvers')
    parser.add_argument('--reanchor', type=int, help='recompute scores from scratch every R windows, 0 disables')
    parser.add_argument('--warmup', type=int, help='number of leading windows used only to initialize statistics')
    parser.add_argument('--metric', choices=['s', 'w', 'both'], help='score kinds to compute')
    parser.add_argument('--topk', type=int, help='number of nodes reported per window')


def process_args(argv):
    """
    Process the passed arguments and return the result
    :param argv: passed arguments
    """

    parser = argparse.ArgumentParser(prog='rankshift',
                                     description='Detect anomalies in edge streams from the change of '
                                                 'node importance scores')
    parser.add_argument('-V', '--version', action='version', version=__version__, help='show package version and exit')
    parser.add_argument('-e', '--explain', nargs='+', default='', help='provide detailed explanation for issue ids')
    parser.add_argument('-p', '--print-config', action='store_true', help='print the settings that are in effect')
    parser.add_argument('--preset', choices=Config.available_presets(), help='load a named set of defaults')
    parser.add_argument('-t', '--time-report', action='store_true', help='print time report for run stages')
    parser.add_argument('-T', '--profile', action='store_true', help='print cProfile report')
    parser.add_argument('--seed', type=int, help='seed of all randomness')
    parser.add_argument('--out', help='output directory (default: current directory)')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')

    score = subparsers.add_parser('score', help='score an edge file window by window')
    score.add_argument('--input', '-i', type=_is_file_path, required=True,
                       help='edge file, lines of timestamp src dst [label] [sign]')
    score.add_argument('--window', type=float, help='window width in timestamp units (default 3600)')
    score.add_argument('--origin', type=float, help='start of window 0 (default 0)')
    score.add_argument('--nodes', type=int, help='declared number of nodes, at least the number seen')
    score.add_argument('--min-attack-edges', type=int,
                       help='labeled edges needed for a window to count as anomalous (default 50)')
    _add_run_arguments(score)

    generate = subparsers.add_parser('generate', help='write a synthetic edge stream with injected anomalies')
    generate.add_argument('--kind', choices=['s', 'w', 'none'], help='injected anomaly: clique, burst or none')
    generate.add_argument('--nodes', dest='gen_nodes', type=int, help='number of nodes (default 1000)')
    generate.add_argument('--edges', dest='gen_edges', type=int, help='number of base edges (default 8100)')
    generate.add_argument('--timestamps', dest='gen_timestamps', type=int, help='number of timestamps (default 2700)')
    generate.add_argument('--skew', type=float, help='preferential attachment exponent (default 1.0)')
    generate.add_argument('--seed-fraction', type=float, help='share of base edges placed at timestamp 0 (default 0)')
    generate.add_argument('--events', type=int, help='number of injected anomalies (default 50)')
    generate.add_argument('--clique-size', type=int, help='nodes per injected clique (default 8)')
    generate.add_argument('--burst-weight', type=int, help='edges per injected burst (default 70)')
    generate.add_argument('--inject-warmup', type=int, help='first timestamp eligible for injection (default 300)')
    generate.add_argument('--score', action='store_true', help='also score the generated stream')
    _add_run_arguments(generate)

    evaluate = subparsers.add_parser('eval', help='compare a score table with window labels')
    evaluate.add_argument('--scores', '--input', type=_is_file_path, required=True, help='score table from score')
    evaluate.add_argument('--labels', type=_is_file_path, required=True, help='window_index<TAB>0|1 label file')
    evaluate.add_argument('--k', type=_int_list, help='comma separated ranks to evaluate (default 50,100,150,200,250)')
    evaluate.add_argument('--metric', choices=['s', 'w', 'both'], help='score column to rank by')
    evaluate.add_argument('--derivative', choices=['1', '2', 'both'], help='derivative order to rank by')

    # print help if there is no argument
    if len(argv) < 1:
        parser.print_help()
        sys.exit(0)

    options = parser.parse_args(args=argv)

    # convert options to dict
    options_dict = vars(options)
    return options_dict


def main():
    """
    Main wrapper for rankshift command processing
    """
    options = process_args(sys.argv[1:])
    try:
        detector = Detector(options)
    except ConfigError as err:
        print_warning(err.format())
        sys.exit(err.exit_code)
    sys.exit(detector.run())
