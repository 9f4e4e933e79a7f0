"""
Synthetic temporal graphs with injected anomalies.

The base stream is produced by a preferential attachment process: every
new edge picks its source and destination with a probability growing with
their current out- and in-degree, so hubs form gradually and the degree
distribution becomes skewed. A skew of 0 picks endpoints uniformly. A share
of the base edges can be placed at timestamp 0 to form an initial graph.

Two kinds of anomalies can be injected on top of it, a clique among random
nodes (structure change) and a burst of parallel edges between two random
nodes (weight change).
"""

from dataclasses import dataclass

import numpy as np
from rankshift.engine import AnomalyEngine
from rankshift.errors import CliqueLargerThanGraph, ConfigError
from rankshift.graphstream import EdgeEvent, window_of


INJECTION_KINDS = ('s', 'w')


@dataclass(frozen=True)
class GeneratorConfig:
    n_nodes: int = 1000
    n_base_edges: int = 8100
    n_timestamps: int = 2700
    seed: int = 0
    skew: float = 1.0
    # share of the base edges placed at timestamp 0
    seed_fraction: float = 0.0

    def __post_init__(self):
        if self.n_nodes < 1 or self.n_timestamps < 1 or self.n_base_edges < 0:
            raise ConfigError(f'invalid generator size {self.n_nodes} nodes, '
                              f'{self.n_base_edges} edges, {self.n_timestamps} timestamps')
        if self.n_base_edges and self.n_nodes < 2:
            raise ConfigError('at least 2 nodes are needed to generate edges')
        if self.skew < 0:
            raise ConfigError(f'skew must not be negative, got {self.skew}')
        if not 0 <= self.seed_fraction <= 1:
            raise ConfigError(f'seed fraction must be between 0 and 1, got {self.seed_fraction}')

    @classmethod
    def from_config(cls, config):
        gen = config.configuration['Generator']
        return cls(n_nodes=gen['Nodes'], n_base_edges=gen['Edges'], n_timestamps=gen['Timestamps'],
                   seed=config.configuration['Seed'], skew=gen['Skew'],
                   seed_fraction=gen['SeedFraction'])


@dataclass(frozen=True)
class InjectionPlan:
    kind: str = 's'
    n_events: int = 50
    clique_size: int = 8
    burst_weight: int = 70
    seed: int = 0
    # injections only go to windows at or after this one
    warmup: int = 300

    def __post_init__(self):
        if self.kind not in INJECTION_KINDS:
            raise ConfigError(f'injection kind must be one of {", ".join(INJECTION_KINDS)}, got {self.kind}')
        if self.n_events < 0 or self.burst_weight < 0 or self.warmup < 0:
            raise ConfigError('injection sizes must not be negative')
        if self.clique_size < 2:
            raise ConfigError(f'clique size must be at least 2, got {self.clique_size}')

    @classmethod
    def from_config(cls, config, kind=None):
        inj = config.configuration['Injection']
        return cls(kind=kind or inj['Kind'], n_events=inj['Events'], clique_size=inj['CliqueSize'],
                   burst_weight=inj['BurstWeight'], seed=config.configuration['Seed'],
                   warmup=inj['Warmup'])


def generate_stream(cfg):
    """
    Generate a timestamp sorted stream of base (unlabeled) insertions.

    The same configuration always yields the same stream.
    """
    if cfg.n_base_edges == 0:
        return []
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_nodes
    n_seed = round(cfg.seed_fraction * cfg.n_base_edges)
    timestamps = np.sort(np.concatenate([
        np.zeros(n_seed, dtype=np.int64),
        rng.integers(0, cfg.n_timestamps, size=cfg.n_base_edges - n_seed)]))
    out_degree = np.zeros(n)
    in_degree = np.zeros(n)
    events = []
    for timestamp in timestamps:
        weights = (out_degree + 1) ** cfg.skew
        src = rng.choice(n, p=weights / weights.sum())
        weights = (in_degree + 1) ** cfg.skew
        weights[src] = 0.0
        dst = rng.choice(n, p=weights / weights.sum())
        out_degree[src] += 1
        in_degree[dst] += 1
        events.append(EdgeEvent(int(src), int(dst), int(timestamp)))
    return events


def _injection_rng(plan):
    return np.random.default_rng([plan.seed, INJECTION_KINDS.index(plan.kind) + 1])


def _injection_windows(rng, plan, n_windows):
    candidates = np.arange(plan.warmup, n_windows)
    if plan.n_events > len(candidates):
        raise ConfigError(f'cannot place {plan.n_events} injections in {len(candidates)} windows after warm-up')
    return np.sort(rng.choice(candidates, size=plan.n_events, replace=False))


def _merge(stream, injected, chosen, n_windows):
    # stable sort keeps base events ahead of the injected ones at equal timestamps
    merged = sorted(list(stream) + injected, key=lambda e: e.timestamp)
    labels = np.zeros(n_windows, dtype=bool)
    labels[chosen] = True
    return merged, {w: bool(labels[w]) for w in range(n_windows)}


def inject_s(stream, plan, n_nodes, n_windows):
    """
    Add a clique among clique_size random nodes, edges in both directions,
    at n_events random windows.

    Returns:
        Tuple of the new stream and a dictionary window -> injected flag.
    """
    if plan.clique_size > n_nodes:
        raise CliqueLargerThanGraph(f'clique of {plan.clique_size} nodes in a graph of {n_nodes}')
    rng = _injection_rng(plan)
    chosen = _injection_windows(rng, plan, n_windows)
    injected = []
    for window in chosen:
        members = [int(x) for x in rng.choice(n_nodes, size=plan.clique_size, replace=False)]
        for u in members:
            for v in members:
                if u != v:
                    injected.append(EdgeEvent(u, v, int(window), label=True))
    return _merge(stream, injected, chosen, n_windows)


def inject_w(stream, plan, n_nodes, n_windows):
    """
    Add burst_weight parallel edges between two distinct random nodes at
    n_events random windows.
    """
    if n_nodes < 2:
        raise CliqueLargerThanGraph(f'weight injection needs 2 nodes, graph has {n_nodes}')
    rng = _injection_rng(plan)
    chosen = _injection_windows(rng, plan, n_windows)
    injected = []
    for window in chosen:
        u, v = (int(x) for x in rng.choice(n_nodes, size=2, replace=False))
        injected.extend(EdgeEvent(u, v, int(window), label=True) for _ in range(plan.burst_weight))
    return _merge(stream, injected, chosen, n_windows)


def inject(stream, plan, n_nodes, n_windows):
    if plan.kind == 's':
        return inject_s(stream, plan, n_nodes, n_windows)
    return inject_w(stream, plan, n_nodes, n_windows)


def label_windows(events, min_attack_edges=50, window=1, origin=0):
    """
    Label every window between the first and the last event: anomalous iff
    it holds at least min_attack_edges labeled events.
    """
    counts = {}
    for event in events:
        index = window_of(event.timestamp, window, origin)
        counts[index] = counts.get(index, 0) + int(bool(event.label))
    if not counts:
        return {}
    return {w: counts.get(w, 0) >= min_attack_edges for w in range(min(counts), max(counts) + 1)}


def generate_dataset(config):
    """
    Build the synthetic stream and its window labels as configured.

    Injection kind 'none' returns the base stream with all windows normal.
    """
    cfg = GeneratorConfig.from_config(config)
    stream = generate_stream(cfg)
    kind = config.configuration['Injection']['Kind']
    if kind == 'none':
        return stream, {w: False for w in range(cfg.n_timestamps)}
    plan = InjectionPlan.from_config(config, kind)
    return inject(stream, plan, cfg.n_nodes, cfg.n_timestamps)


def run_injection_experiment(gen_cfg, plan, config):
    """
    Generate a stream, inject anomalies and score it in-process.

    Windows are one timestamp wide, so window indices match the label keys.
    A plan of None scores the base stream.

    Returns:
        Tuple of the list of AnomalyRecords and the window labels.
    """
    stream = generate_stream(gen_cfg)
    if plan is None:
        labels = {w: False for w in range(gen_cfg.n_timestamps)}
    else:
        stream, labels = inject(stream, plan, gen_cfg.n_nodes, gen_cfg.n_timestamps)
    config.set('Window', 1)
    config.set('Origin', 0)
    engine = AnomalyEngine(config, gen_cfg.n_nodes)
    return list(engine.run(stream)), labels
