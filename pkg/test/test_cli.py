from pathlib import PosixPath
import sys

import pytest
from rankshift.cli import main, process_args

from Testing import get_tested_path


def test_no_arguments_prints_help(capsys):
    with pytest.raises(SystemExit) as exc:
        process_args([])
    assert exc.value.code == 0
    out, _ = capsys.readouterr()
    assert 'score' in out
    assert 'generate' in out


@pytest.mark.parametrize('test_arguments', [
    ['score'],
    ['score', '--input', 'thisdoesntexist.tsv'],
    ['eval', '--scores', 'thisdoesntexist.tsv', '--labels', 'thisdoesntexist.tsv'],
    ['--preset', 'BULLSHIT', 'score', '--input', 'test/files/edges.tsv'],
    ['score', '--input', 'test/files/edges.tsv', '--metric', 'x'],
])
def test_invalid_arguments(test_arguments):
    with pytest.raises(SystemExit) as exc:
        process_args(test_arguments)
    assert exc.value.code == 2


def test_parsing_score():
    path = str(get_tested_path('files', 'edges.tsv'))
    parsed = process_args(['--seed', '3', '-t', 'score', '-i', path, '--window', '10', '--warmup', '0',
                           '--metric', 'w', '--reanchor', '0'])
    assert parsed['command'] == 'score'
    assert parsed['input'] == PosixPath(path)
    assert parsed['window'] == 10.0
    assert parsed['warmup'] == 0
    assert parsed['metric'] == 'w'
    assert parsed['reanchor'] == 0
    assert parsed['seed'] == 3
    assert parsed['time_report']
    assert parsed['damping'] is None


def test_parsing_generate():
    parsed = process_args(['generate', '--kind', 'w', '--nodes', '50', '--edges', '10', '--timestamps', '20',
                           '--burst-weight', '9', '--seed-fraction', '0.25', '--score'])
    assert (parsed['gen_nodes'], parsed['gen_edges'], parsed['gen_timestamps']) == (50, 10, 20)
    assert parsed['kind'] == 'w'
    assert parsed['burst_weight'] == 9
    assert parsed['seed_fraction'] == 0.25
    assert parsed['score']


def test_parsing_eval_ranks():
    path = str(get_tested_path('files', 'edges.tsv'))
    parsed = process_args(['eval', '--scores', path, '--labels', path, '--k', '5,10,20', '--derivative', '2'])
    assert parsed['k'] == [5, 10, 20]
    assert parsed['derivative'] == '2'
    with pytest.raises(SystemExit):
        process_args(['eval', '--scores', path, '--labels', path, '--k', '5,x'])


def test_main_exit_code(monkeypatch, tmp_path, capsys):
    path = str(get_tested_path('files', 'malformed.tsv'))
    monkeypatch.setattr(sys, 'argv', ['rankshift', '--out', str(tmp_path), 'score', '-i', path])
    with pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == 3
    _, err = capsys.readouterr()
    assert 'malformed.tsv:17: E: malformed-line' in err


def test_main_invalid_config(monkeypatch, tmp_path, capsys):
    path = str(get_tested_path('files', 'edges.tsv'))
    monkeypatch.setattr(sys, 'argv', ['rankshift', '--out', str(tmp_path), 'score', '-i', path, '--damping', '1.5'])
    with pytest.raises(SystemExit) as exc:
        main()
    assert exc.value.code == 4
    _, err = capsys.readouterr()
    assert 'invalid-config' in err
