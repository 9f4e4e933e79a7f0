from dataclasses import dataclass, field
from operator import attrgetter

import numpy as np
from rankshift.errors import EmptyGroundTruth, EmptyInput, KTooLarge, MisalignedWindows


METRICS = ('s', 'w', 'both')
DERIVATIVES = ('1', '2', 'both')

# (metric, derivative) -> AnomalyRecord columns whose maximum is ranked
_COLUMNS = {
    ('s', '1'): ('l1_d1s',),
    ('s', '2'): ('l1_d2s',),
    ('s', 'both'): ('score_s',),
    ('w', '1'): ('l1_d1w',),
    ('w', '2'): ('l1_d2w',),
    ('w', 'both'): ('score_w',),
    ('both', '1'): ('l1_d1s', 'l1_d1w'),
    ('both', '2'): ('l1_d2s', 'l1_d2w'),
    ('both', 'both'): ('score',),
}


def ranking_key(metric='both', derivative='both'):
    """Return a function giving the ranking value of a record."""
    columns = _COLUMNS[(metric, str(derivative))]
    if len(columns) == 1:
        return attrgetter(columns[0])
    getter = attrgetter(*columns)
    return lambda record: max(getter(record))


RANKINGS = {f'{metric}/{derivative}': ranking_key(metric, derivative)
            for metric in METRICS for derivative in DERIVATIVES}


@dataclass(frozen=True)
class WindowScore:
    window_index: int
    score: float
    label: bool


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    rate: float
    above: int
    true_positives: int
    # set when no window lies strictly above the threshold
    degenerate: bool = False


@dataclass
class EvalResult:
    ks: list
    precision: dict = field(default_factory=dict)
    recall: dict = field(default_factory=dict)
    hits: dict = field(default_factory=dict)
    total_anomalies: int = 0
    threshold: ThresholdResult = None
    table: list = field(default_factory=list)


def _as_key(key):
    return attrgetter(key) if isinstance(key, str) else key


def scored_windows(records, labels, key='score'):
    """
    Pair every non warm-up record with its label.

    Raises:
        MisalignedWindows: when a scored window has no label.
    """
    key = _as_key(key)
    table = []
    for record in records:
        if record.warmup:
            continue
        if record.window_index not in labels:
            raise MisalignedWindows(f'window {record.window_index} has no label')
        table.append(WindowScore(record.window_index, float(key(record)), bool(labels[record.window_index])))
    return table


def rank(table):
    """Sort by descending score, earlier window first on ties."""
    return sorted(table, key=lambda w: (-w.score, w.window_index))


def _hits_at(ranked, k):
    if k > len(ranked):
        raise KTooLarge(f'k={k} but only {len(ranked)} windows are scored')
    if k < 1:
        raise KTooLarge(f'k must be at least 1, got {k}')
    return sum(w.label for w in ranked[:k])


def precision_at_k(records, labels, k, key='score'):
    """Fraction of the k highest scored non warm-up windows labeled anomalous."""
    ranked = rank(scored_windows(records, labels, key))
    return _hits_at(ranked, k) / k


def score_threshold(scores):
    """mean + std / 2 of the scores, population standard deviation."""
    scores = np.asarray(scores, dtype=np.float64)
    return float(scores.mean() + 0.5 * scores.std())


def table_threshold_rate(table):
    """
    Fraction of the scored windows strictly above mean + std / 2 that are
    labeled anomalous. The standard deviation is the population one.
    """
    if not table:
        raise EmptyInput('no scored windows')
    threshold = score_threshold([w.score for w in table])
    above = [w for w in table if w.score > threshold]
    if not above:
        return ThresholdResult(threshold, 0.0, 0, 0, degenerate=True)
    true_positives = sum(w.label for w in above)
    return ThresholdResult(threshold, true_positives / len(above), len(above), true_positives)


def threshold_rate(records, labels, key='score'):
    """Threshold rate of the non warm-up records."""
    return table_threshold_rate(scored_windows(records, labels, key))


def precision_recall_curve(records, labels, ks, key='score'):
    """
    Precision and recall at each k.

    Recall is relative to the anomalous windows among the scored ones.

    Raises:
        EmptyGroundTruth: when no scored window is anomalous.
        KTooLarge: when a k exceeds the number of scored windows.
    """
    table = scored_windows(records, labels, key)
    total = sum(w.label for w in table)
    if total == 0:
        raise EmptyGroundTruth('no anomalous window among the scored ones')
    ranked = rank(table)
    result = EvalResult(ks=list(ks), total_anomalies=total, table=table)
    for k in result.ks:
        hits = _hits_at(ranked, k)
        result.hits[k] = hits
        result.precision[k] = hits / k
        result.recall[k] = hits / total
    result.threshold = table_threshold_rate(table)
    return result
