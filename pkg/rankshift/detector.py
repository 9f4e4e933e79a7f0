from collections import defaultdict
import cProfile
import operator
from pathlib import Path
from pstats import Stats
import time

from rankshift.color import Color
from rankshift.config import Config
from rankshift.edgefile import (read_edges, read_labels, read_scores, write_attribution, write_edges,
                                write_eval, write_labels, write_nodes, write_scores)
from rankshift.engine import AnomalyEngine
from rankshift.errors import get_description, load_descriptions, RankshiftError
from rankshift.evaluation import precision_recall_curve, ranking_key, score_threshold
from rankshift.helpers import format_number, print_warning, string_center
from rankshift.synth import generate_dataset, GeneratorConfig, label_windows
from rankshift.version import __version__


class Detector:
    """
    Generic object handling the basic rankshift operations: scoring a
    stream, generating a synthetic one and evaluating a score table.
    """

    def __init__(self, options):
        self.options = options
        self.duration = defaultdict(float)
        self.engine = None
        self.windows_scored = 0
        self.events_read = 0
        self.config = Config(options.get('preset'))
        self.config.apply_options(options)
        if options.get('profile'):
            self.profile = cProfile.Profile()
            self.profile.enable()
        else:
            self.profile = None

    def _run(self):
        start = time.monotonic()
        # if we just want to print config, do so and leave
        if self.options.get('print_config'):
            self.config.print_config()
            return 0
        # just explain the issues and leave too
        if self.options.get('explain'):
            self.print_explanation(self.options['explain'])
            return 0
        command = self.options.get('command')
        if not command:
            print_warning('There is no command to run, use one of score, generate, eval.')
            return 2
        self.config.validate()
        retcode = getattr(self, f'cmd_{command}')()

        self._maybe_print_reports()
        duration = time.monotonic() - start
        msg = string_center(f'{command}: {self.events_read} events, {self.windows_scored} windows; '
                            f'has taken {duration:.1f} s', '=')
        print(f'{Color.Bold}{msg}{Color.Reset}')
        return retcode

    def run(self):
        try:
            return self._run()
        except KeyboardInterrupt as e:
            self._maybe_print_reports()
            raise e
        except RankshiftError as err:
            source = self.options.get('input') or self.options.get('scores')
            print_warning(err.locate(filename=str(source) if source else None).format())
            self._maybe_print_reports()
            return err.exit_code

    def _output_dir(self):
        out = Path(self.options.get('out') or '.')
        out.mkdir(parents=True, exist_ok=True)
        return out

    def _print_header(self, n):
        """
        Print out header information about the scoring session.
        """
        intro = string_center('rankshift session starts', '=')
        print(f'{Color.Bold}{intro}{Color.Reset}')
        print(f'rankshift: {__version__}')
        print('configuration:')
        for config in self.config.conf_files:
            print(f'    {config}')
        cfg = self.config.configuration
        print(f'{Color.Bold}metric: {cfg["Metric"]}, window: {cfg["Window"]}, nodes: {n}, '
              f'events: {self.events_read}{Color.Reset}')
        print('')

    def _score_events(self, events, n):
        records = []
        if not events:
            return records
        self.engine = AnomalyEngine(self.config, n)
        for record in self.engine.run(events):
            records.append(record)
        self.windows_scored = len(records)
        for stage, value in self.engine.duration.items():
            self.duration[stage] += value
        return records

    def _write_scores(self, out, records, nodes=None):
        start = time.monotonic()
        write_scores(out / 'scores.tsv', records)
        write_attribution(out / 'attribution.tsv', records, nodes)
        self.duration['write'] += time.monotonic() - start

    def cmd_score(self):
        """
        Score an edge file window by window and write the score table, the
        attribution report, the node table and the derived window labels.
        """
        cfg = self.config.configuration
        out = self._output_dir()
        start = time.monotonic()
        events, nodes = read_edges(self.options['input'])
        self.events_read = len(events)
        self.duration['parse'] += time.monotonic() - start
        n = max(cfg['Nodes'], len(nodes))
        self._print_header(n)

        records = self._score_events(events, n)
        self._write_scores(out, records, nodes)
        write_nodes(out / 'nodes.tsv', nodes, n)
        write_labels(out / 'labels.tsv', label_windows(events, cfg['MinAttackEdges'], cfg['Window'], cfg['Origin']))
        self._print_top_windows(records, nodes)
        return 0

    def cmd_generate(self):
        """
        Write a synthetic edge file and its window labels, optionally scored.
        """
        out = self._output_dir()
        start = time.monotonic()
        stream, labels = generate_dataset(self.config)
        self.events_read = len(stream)
        self.duration['generate'] += time.monotonic() - start
        write_edges(out / 'edges.tsv', stream)
        write_labels(out / 'labels.tsv', labels)
        print(f'{len(stream)} events, {sum(labels.values())} anomalous windows written to {out}')
        if self.options.get('score'):
            # one window per generated timestamp
            self.config.set('Window', 1)
            self.config.set('Origin', 0)
            n = GeneratorConfig.from_config(self.config).n_nodes
            records = self._score_events(stream, n)
            self._write_scores(out, records)
            self._print_top_windows(records)
        return 0

    def cmd_eval(self):
        """
        Rank the windows of a score table and compare them with labels.
        """
        cfg = self.config.configuration
        out = self._output_dir()
        records = read_scores(self.options['scores'])
        labels = read_labels(self.options['labels'])
        key = ranking_key(cfg['Metric'], self.options.get('derivative') or 'both')
        result = precision_recall_curve(records, labels, cfg['EvalK'], key)
        self.windows_scored = len(result.table)
        write_eval(out, result)

        print(f'{Color.Bold}{"k":>8} {"precision":>12} {"recall":>12} {"hits":>8}{Color.Reset}')
        for k in result.ks:
            print(f'{k:>8} {result.precision[k]:12.3f} {result.recall[k]:12.3f} {result.hits[k]:>8}')
        t = result.threshold
        note = ' (nothing above threshold)' if t.degenerate else ''
        print(f'threshold {format_number(t.threshold)}: {t.true_positives}/{t.above} true positives, '
              f'rate {t.rate:.3f}{note}')
        return 0

    def _print_top_windows(self, records, nodes=None, count=5):
        scored = [r for r in records if not r.warmup]
        if not scored:
            return
        ranked = sorted(scored, key=lambda r: (-r.score, r.window_index))[:count]
        threshold = score_threshold([r.score for r in scored])
        print(f'{Color.Bold}top windows{Color.Reset} (threshold {format_number(threshold)}):')
        for r in ranked:
            color = Color.Red if r.score > threshold else ''
            detail = ''
            if r.top_nodes:
                culprit = r.top_nodes[0]
                node = nodes.name(culprit.node) if nodes else culprit.node
                detail = f' node {node} ({culprit.channel})'
            print(f'    window {r.window_index:>8} {color}{r.score:14.4f}{Color.Reset}{detail}')

    def _maybe_print_reports(self):
        if self.options.get('time_report'):
            self._print_time_report()
        if self.profile:
            self._print_cprofile()

    def _get_color_time_report_value(self, fraction):
        if fraction > 25:
            color = Color.Red
        elif fraction > 5:
            color = Color.Yellow
        else:
            color = ''
        return f'{color}{fraction:17.1f}{Color.Reset}'

    def _print_time_report(self):
        PERCENT_THRESHOLD = 1
        TIME_THRESHOLD = 0.1
        total = sum(self.duration.values())
        if not total:
            return
        scores = {score.name: score for score in self.engine.scores} if self.engine else {}
        print(f'{Color.Bold}Stage time report{Color.Reset} (>{PERCENT_THRESHOLD}% & >{TIME_THRESHOLD}s):')

        stage = format('Stage', '32s')
        duration = format('Duration (in s)', '>12')
        fraction = format('Fraction (in %)', '>17')
        print(f'{Color.Bold}    {stage} {duration} {fraction}     Iterations{Color.Reset}')
        for stage, duration in sorted(self.duration.items(), key=operator.itemgetter(1), reverse=True):
            fraction = 100.0 * duration / total
            if fraction < PERCENT_THRESHOLD or duration < TIME_THRESHOLD:
                continue
            iterations = scores[stage].iterations if stage in scores else ''
            print(f'    {stage:32s} {duration:15.1f} {self._get_color_time_report_value(fraction)} {iterations:>14}')

        print(f'    {"TOTAL":32s} {total:15.1f} {100:17.1f}\n')       # noqa Q000

    def _print_cprofile(self):
        N = 30
        print(f'{Color.Bold}cProfile report:{Color.Reset}')
        self.profile.disable()
        stats = Stats(self.profile)
        stats.sort_stats('cumulative').print_stats(N)
        print('========================================================')
        stats.sort_stats('ncalls').print_stats(N)
        print('========================================================')
        stats.sort_stats('tottime').print_stats(N)

    def print_explanation(self, issues):
        """
        Print out detailed explanation for the specified issue ids.
        """
        descriptions = load_descriptions()
        for issue in issues:
            explanation = get_description(issue, descriptions)
            if not explanation:
                explanation = 'Unknown issue, please report a bug if the description should be present.\n\n'
            print(f'{issue}:\n{explanation}')
