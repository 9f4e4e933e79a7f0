"""
Reading and writing of the text files: edge streams, window labels, score
tables, attribution reports, node tables and evaluation results.

All outputs are tab separated ASCII with a fixed float representation so
identical runs produce byte-identical files.
"""

import math
from pathlib import Path

from rankshift.errors import MalformedLine
from rankshift.graphstream import EdgeEvent
from rankshift.helpers import format_number, readlines
from rankshift.metrics import AnomalyRecord


SCORE_COLUMNS = ('window_index', 't_start', 'score', 'score_s', 'score_w',
                 'l1_d1s', 'l1_d2s', 'l1_d1w', 'l1_d2w', 'warmup')
ATTRIBUTION_COLUMNS = ('window_index', 'rank', 'node', 'score', 'channel')
EVAL_COLUMNS = ('k', 'precision', 'recall', 'hits')
THRESHOLD_COLUMNS = ('threshold', 'above', 'true_positives', 'rate', 'degenerate')
WINDOW_COLUMNS = ('window_index', 'score', 'label')

LABEL_VALUES = {'0': False, '1': True}
SIGN_VALUES = {'+': 1, '-': -1}


class NodeTable:
    """Intern arbitrary node names to dense integer ids in order of appearance."""

    def __init__(self):
        self.ids = {}
        self.names = []

    def __len__(self):
        return len(self.names)

    def intern(self, name):
        node = self.ids.get(name)
        if node is None:
            node = self.ids[name] = len(self.names)
            self.names.append(name)
        return node

    def name(self, node):
        # nodes declared with --nodes but never seen keep their number
        return self.names[node] if node < len(self.names) else str(node)


def parse_number(text):
    """Parse an integer if possible, a float otherwise."""
    try:
        return int(text)
    except ValueError:
        return float(text)


def split_fields(line):
    return line.split('\t') if '\t' in line else line.split(',')


def parse_edge_line(line, nodes):
    """
    Parse `timestamp src dst [label] [sign]` into an EdgeEvent.

    Raises:
        ValueError: when the line is malformed.
    """
    fields = [field.strip() for field in split_fields(line)]
    if not 3 <= len(fields) <= 5:
        raise ValueError(f'expected 3 to 5 fields, got {len(fields)}')
    timestamp = parse_number(fields[0])
    try:
        finite = math.isfinite(timestamp)
    except OverflowError:
        finite = False
    if not finite:
        raise ValueError(f'timestamp must be a finite number, got {fields[0]!r}')
    if not fields[1] or not fields[2]:
        raise ValueError('empty node name')
    label = False
    sign = 1
    if len(fields) > 3:
        if fields[3] not in LABEL_VALUES:
            raise ValueError(f'label must be 0 or 1, got {fields[3]!r}')
        label = LABEL_VALUES[fields[3]]
    if len(fields) > 4:
        if fields[4] not in SIGN_VALUES:
            raise ValueError(f'sign must be + or -, got {fields[4]!r}')
        sign = SIGN_VALUES[fields[4]]
    return EdgeEvent(nodes.intern(fields[1]), nodes.intern(fields[2]), timestamp, sign, label)


def read_edges(path, nodes=None):
    """
    Read an edge file, skipping blank lines and # comments.

    Returns:
        Tuple of the list of EdgeEvents and the NodeTable.
    """
    nodes = NodeTable() if nodes is None else nodes
    events = []
    for lineno, line in readlines(path):
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        try:
            event = parse_edge_line(line, nodes)
        except ValueError as err:
            raise MalformedLine(str(err), filename=str(path), line=lineno)
        events.append(EdgeEvent(event.src, event.dst, event.timestamp, event.sign, event.label, lineno))
    return events, nodes


def _write_table(path, header, rows):
    with open(path, 'w', encoding='ascii', newline='\n') as f:
        if header:
            f.write('\t'.join(header) + '\n')
        for row in rows:
            f.write('\t'.join(str(value) for value in row) + '\n')


def _number(value):
    return value if isinstance(value, int) else format_number(value)


def write_edges(path, events, nodes=None):
    """Write events as `timestamp src dst label [sign]` lines."""
    rows = []
    for e in events:
        src = nodes.name(e.src) if nodes else e.src
        dst = nodes.name(e.dst) if nodes else e.dst
        row = [_number(e.timestamp), src, dst, int(e.label)]
        if e.sign < 0:
            row.append('-')
        rows.append(row)
    _write_table(path, None, rows)


def write_labels(path, labels):
    _write_table(path, None, ((w, int(labels[w])) for w in sorted(labels)))


def read_labels(path):
    """Read a `window_index<TAB>0|1` file into a dictionary."""
    labels = {}
    for lineno, line in readlines(path):
        if not line.strip():
            continue
        fields = line.split('\t')
        try:
            if len(fields) != 2 or fields[1] not in LABEL_VALUES:
                raise ValueError(f'expected window_index<TAB>0|1, got {line!r}')
            labels[int(fields[0])] = LABEL_VALUES[fields[1]]
        except ValueError as err:
            raise MalformedLine(str(err), filename=str(path), line=lineno)
    return labels


def write_nodes(path, nodes, n=None):
    n = len(nodes) if n is None else n
    _write_table(path, ('index', 'node'), ((i, nodes.name(i)) for i in range(n)))


def write_scores(path, records):
    rows = []
    for r in records:
        rows.append([r.window_index, _number(r.t_start)]
                    + [format_number(r.value(column)) for column in SCORE_COLUMNS[2:-1]]
                    + [int(r.warmup)])
    _write_table(path, SCORE_COLUMNS, rows)


def read_scores(path):
    """
    Read a score table back into AnomalyRecords (without attribution).
    """
    records = []
    header = None
    for lineno, line in readlines(path):
        if not line.strip():
            continue
        fields = line.split('\t')
        if header is None:
            header = fields
            missing = set(SCORE_COLUMNS) - set(header)
            if missing:
                raise MalformedLine(f'missing columns {", ".join(sorted(missing))}', filename=str(path), line=lineno)
            continue
        try:
            if len(fields) != len(header):
                raise ValueError(f'expected {len(header)} fields, got {len(fields)}')
            values = dict(zip(header, fields))
            records.append(AnomalyRecord(
                window_index=int(values['window_index']),
                t_start=parse_number(values['t_start']),
                warmup=values['warmup'] == '1',
                **{column: float(values[column]) for column in SCORE_COLUMNS[2:-1]}))
        except ValueError as err:
            raise MalformedLine(str(err), filename=str(path), line=lineno)
    return records


def write_attribution(path, records, nodes=None):
    rows = []
    for r in records:
        for rank, top in enumerate(r.top_nodes, start=1):
            node = nodes.name(top.node) if nodes else top.node
            rows.append([r.window_index, rank, node, format_number(top.score), top.channel])
    _write_table(path, ATTRIBUTION_COLUMNS, rows)


def write_eval(out_dir, result):
    """Write eval.tsv, threshold.tsv and windows.tsv into out_dir."""
    out_dir = Path(out_dir)
    _write_table(out_dir / 'eval.tsv', EVAL_COLUMNS,
                 ([k, format_number(result.precision[k]), format_number(result.recall[k]), result.hits[k]]
                  for k in result.ks))
    t = result.threshold
    _write_table(out_dir / 'threshold.tsv', THRESHOLD_COLUMNS,
                 [[format_number(t.threshold), t.above, t.true_positives, format_number(t.rate), int(t.degenerate)]])
    _write_table(out_dir / 'windows.tsv', WINDOW_COLUMNS,
                 ([w.window_index, format_number(w.score), int(w.label)] for w in result.table))
