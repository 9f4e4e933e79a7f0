import pytest
from rankshift.edgefile import (
    NodeTable, parse_edge_line, read_edges, read_labels, read_scores, SCORE_COLUMNS, write_attribution,
    write_edges, write_eval, write_labels, write_nodes, write_scores
)
from rankshift.errors import MalformedLine
from rankshift.evaluation import precision_recall_curve
from rankshift.graphstream import EdgeEvent
from rankshift.metrics import AnomalyRecord, NodeAttribution

from Testing import get_tested_path


def test_node_table_interns_in_order():
    nodes = NodeTable()
    assert [nodes.intern(name) for name in ('b', 'a', 'b', 'c')] == [0, 1, 0, 2]
    assert len(nodes) == 3
    assert nodes.name(1) == 'a'
    assert nodes.name(7) == '7'


@pytest.mark.parametrize('line, expected', [
    ('5\ta\tb', EdgeEvent(0, 1, 5)),
    ('5,a,b', EdgeEvent(0, 1, 5)),
    ('2.5\ta\tb\t1', EdgeEvent(0, 1, 2.5, 1, True)),
    ('5\tb\ta\t0\t-', EdgeEvent(1, 0, 5, -1, False)),
    (' 5 , a , b ', EdgeEvent(0, 1, 5)),
])
def test_parse_edge_line(line, expected):
    nodes = NodeTable()
    nodes.intern('a')
    nodes.intern('b')
    assert parse_edge_line(line, nodes) == expected


@pytest.mark.parametrize('line', [
    '5\ta', '5\ta\tb\t1\t+\textra', 'x\ta\tb', '5\t\tb', '5\ta\tb\t2', '5\ta\tb\t1\t*',
])
def test_parse_edge_line_malformed(line):
    with pytest.raises(ValueError):
        parse_edge_line(line, NodeTable())


@pytest.mark.parametrize('name', ['edges.tsv', 'edges.tsv.gz'])
def test_read_edges(name):
    events, nodes = read_edges(get_tested_path('files', name))
    assert len(events) == 18
    assert nodes.names == ['alice', 'bob', 'carol', 'dave', 'erin']
    assert events[0] == EdgeEvent(0, 1, 0)
    assert events[0].line == 2
    deletion = next(e for e in events if e.sign < 0)
    assert (deletion.src, deletion.dst, deletion.timestamp, deletion.line) == (1, 2, 15, 13)
    assert sum(e.label for e in events) == 4


def test_read_edges_csv():
    events, nodes = read_edges(get_tested_path('files', 'edges.csv'))
    assert [(e.timestamp, e.src, e.dst) for e in events] == [(0, 0, 1), (1, 1, 2), (2, 2, 0)]


def test_read_edges_empty():
    events, nodes = read_edges(get_tested_path('files', 'empty.tsv'))
    assert events == []
    assert len(nodes) == 0


def test_read_edges_reports_line_number():
    path = get_tested_path('files', 'malformed.tsv')
    with pytest.raises(MalformedLine) as exc:
        read_edges(path)
    assert exc.value.line == 17
    assert str(exc.value).startswith('malformed.tsv:17: E: malformed-line')


@pytest.mark.parametrize('timestamp', ['nan', 'inf', '-inf', '1e400', '1' + '0' * 400])
def test_read_edges_rejects_infinite_timestamps(tmp_path, timestamp):
    path = tmp_path / 'bad.tsv'
    path.write_text(f'1\ta\tb\n{timestamp}\tb\tc\n')
    with pytest.raises(MalformedLine) as exc:
        read_edges(path)
    assert exc.value.line == 2
    assert str(exc.value).startswith('bad.tsv:2: E: malformed-line')


def test_edges_and_labels_files(tmp_path):
    nodes = NodeTable()
    for name in ('x', 'y'):
        nodes.intern(name)
    events = [EdgeEvent(0, 1, 3), EdgeEvent(1, 0, 4, -1, True)]
    write_edges(tmp_path / 'edges.tsv', events, nodes)
    assert (tmp_path / 'edges.tsv').read_text() == '3\tx\ty\t0\n4\ty\tx\t1\t-\n'
    read, read_nodes = read_edges(tmp_path / 'edges.tsv')
    assert [(e.src, e.dst, e.timestamp, e.sign, e.label) for e in read] == [(0, 1, 3, 1, False), (1, 0, 4, -1, True)]
    assert read_nodes.names == ['x', 'y']

    write_labels(tmp_path / 'labels.tsv', {2: True, 0: False, 1: False})
    assert (tmp_path / 'labels.tsv').read_text() == '0\t0\n1\t0\n2\t1\n'
    assert read_labels(tmp_path / 'labels.tsv') == {0: False, 1: False, 2: True}


def test_read_labels_malformed(tmp_path):
    (tmp_path / 'labels.tsv').write_text('0\t0\n1\tyes\n')
    with pytest.raises(MalformedLine) as exc:
        read_labels(tmp_path / 'labels.tsv')
    assert exc.value.line == 2


def test_scores_table(tmp_path):
    records = [
        AnomalyRecord(0, 0.0, warmup=True, t_start=0),
        AnomalyRecord(1, 2.5, score_s=1.25, score_w=2.5, l1_d1s=0.1, l1_d2s=1 / 3, l1_d1w=0.2, l1_d2w=0.4, t_start=60),
    ]
    path = tmp_path / 'scores.tsv'
    write_scores(path, records)
    lines = path.read_text().splitlines()
    assert lines[0].split('\t') == list(SCORE_COLUMNS)
    assert lines[2] == '1\t60\t2.5\t1.25\t2.5\t0.1\t0.333333333333\t0.2\t0.4\t0'
    read = read_scores(path)
    assert read[0] == records[0]
    assert read[1].window_index == 1
    assert read[1].score == 2.5
    assert read[1].l1_d2s == pytest.approx(1 / 3)


def test_read_scores_missing_columns(tmp_path):
    (tmp_path / 'scores.tsv').write_text('window_index\tscore\n0\t1.0\n')
    with pytest.raises(MalformedLine) as exc:
        read_scores(tmp_path / 'scores.tsv')
    assert exc.value.line == 1


def test_attribution_and_nodes(tmp_path):
    nodes = NodeTable()
    for name in ('u', 'v', 'w'):
        nodes.intern(name)
    record = AnomalyRecord(4, 1.0, top_nodes=(NodeAttribution(2, 3.5, 'w1'), NodeAttribution(0, 1.0, 's2')))
    write_attribution(tmp_path / 'attribution.tsv', [record], nodes)
    assert (tmp_path / 'attribution.tsv').read_text().splitlines()[1:] == ['4\t1\tw\t3.5\tw1', '4\t2\tu\t1\ts2']
    write_nodes(tmp_path / 'nodes.tsv', nodes, n=4)
    assert (tmp_path / 'nodes.tsv').read_text() == 'index\tnode\n0\tu\n1\tv\n2\tw\n3\t3\n'


def test_write_eval(tmp_path):
    records = [AnomalyRecord(i, score) for i, score in enumerate([0.9, 0.1, 0.8, 0.2])]
    result = precision_recall_curve(records, {0: True, 1: False, 2: False, 3: True}, [1, 2])
    write_eval(tmp_path, result)
    assert (tmp_path / 'eval.tsv').read_text() == 'k\tprecision\trecall\thits\n1\t1\t0.5\t1\n2\t0.5\t0.5\t1\n'
    threshold = (tmp_path / 'threshold.tsv').read_text().splitlines()
    assert threshold[0] == 'threshold\tabove\ttrue_positives\trate\tdegenerate'
    assert threshold[1].split('\t')[1:] == ['2', '1', '0.5', '0']
    assert len((tmp_path / 'windows.tsv').read_text().splitlines()) == 5
