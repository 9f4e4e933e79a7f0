from collections import defaultdict
from dataclasses import replace
import importlib
import time

from rankshift.graphstream import close_window, GraphState, ingest_edge, iter_windows, WindowBuffer
from rankshift.metrics import compute_anomaly_score, NodeStats


def load_score(name, config):
    """Load a score plugin by its class name."""
    module = importlib.import_module(f'.{name}', package='rankshift.scores')
    klass = getattr(module, name)
    return klass(config)


def load_scores(config):
    """Load the configured score plugins whose kind the Metric selects."""
    kinds = config.metric_kinds()
    scores = []
    for name in config.configuration['Scores']:
        score = load_score(name, config)
        if score.kind in kinds:
            scores.append(score)
    return scores


class AnomalyEngine:
    """
    Score a stream window by window.

    The engine owns the graph, the score plugins and the per-node
    statistics, so it has to see the windows in order.
    """

    def __init__(self, config, n, scores=None):
        cfg = config.configuration
        self.config = config
        self.n = n
        self.window = cfg['Window']
        self.origin = cfg['Origin']
        self.topk = cfg['TopK']
        self.warmup = cfg['Warmup']
        self.state = GraphState(n)
        self.scores = load_scores(config) if scores is None else scores
        channels = [f'{score.kind}{order}' for score in self.scores for order in (1, 2)]
        self.stats = NodeStats(n, channels, cfg['StdFloor'])
        self.duration = defaultdict(float)
        self.last_timestamp = None
        # raw data of the last window, before normalization
        self.last_delta = None
        self.last_derivatives = {}
        for score in self.scores:
            score.start(self.state)

    def process_window(self, window_index, events):
        """Apply one window of events and return its AnomalyRecord."""
        start = time.monotonic()
        pending = WindowBuffer(window_index, self.last_timestamp)
        for event in events:
            ingest_edge(self.state, event, pending)
        delta = close_window(self.state, pending)
        self.last_timestamp = pending.last_timestamp
        self.duration['graph'] += time.monotonic() - start

        pairs = {}
        for score in self.scores:
            start = time.monotonic()
            score.update(self.state, delta)
            pairs[score.kind] = score.derivatives()
            self.duration[score.name] += time.monotonic() - start

        start = time.monotonic()
        record = compute_anomaly_score(pairs.get('s'), pairs.get('w'), self.stats, self.topk, self.warmup)
        record = replace(record, t_start=self.origin + window_index * self.window)
        self.duration['normalization'] += time.monotonic() - start

        self.last_delta = delta
        self.last_derivatives = pairs
        return record

    def run(self, events):
        """Yield an AnomalyRecord for every window of a sorted stream."""
        for window_index, window_events in iter_windows(events, self.window, self.origin):
            yield self.process_window(window_index, window_events)
