from dataclasses import dataclass, field

import numpy as np
from rankshift.errors import DimensionMismatch


# channel name: score kind followed by the derivative order
CHANNELS = ('s1', 's2', 'w1', 'w2')


@dataclass(frozen=True)
class DerivativePair:
    """First and second order discrete derivatives of one score kind."""

    d1: np.ndarray
    d2: np.ndarray
    kind: str = 's'
    window_index: int = -1

    def l1(self):
        return float(np.abs(self.d1).sum()), float(np.abs(self.d2).sum())

    def channels(self):
        return {f'{self.kind}1': self.d1, f'{self.kind}2': self.d2}


@dataclass(frozen=True)
class NodeAttribution:
    node: int
    score: float
    channel: str


@dataclass(frozen=True)
class AnomalyRecord:
    """Result of scoring one window."""

    window_index: int
    score: float
    score_s: float = 0.0
    score_w: float = 0.0
    l1_d1s: float = 0.0
    l1_d2s: float = 0.0
    l1_d1w: float = 0.0
    l1_d2w: float = 0.0
    warmup: bool = False
    t_start: float = 0.0
    top_nodes: tuple = field(default=(), compare=False)

    def value(self, column):
        return getattr(self, column)


class ChannelStats:
    """Vectorized Welford accumulator of one channel, one entry per node."""

    def __init__(self, n):
        self.count = 0
        self.mean = np.zeros(n)
        self.m2 = np.zeros(n)

    @property
    def std(self):
        """Population standard deviation of the values seen so far."""
        if self.count == 0:
            return np.zeros_like(self.mean)
        return np.sqrt(self.m2 / self.count)

    def update(self, values):
        self.count += 1
        delta = values - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (values - self.mean)


class NodeStats:
    """
    Running mean and variance of the derivative values per node and channel.

    Every window updates each channel exactly once, so all channels share
    the same count.
    """

    def __init__(self, n, channels=CHANNELS, std_floor=1e-12):
        self.n = n
        self.std_floor = std_floor
        self.channels = {channel: ChannelStats(n) for channel in channels}
        self.windows = 0

    def __getitem__(self, channel):
        return self.channels[channel]

    def __contains__(self, channel):
        return channel in self.channels


def derivatives(p_prev2, p_prev, p_curr, dt=1.0, kind='s', window_index=-1):
    """
    Discrete derivatives of a score over consecutive windows.

    Missing history gives zeros: no previous vector means both derivatives
    are zero and no vector two windows back means a zero second derivative.
    """
    p_curr = np.asarray(p_curr, dtype=np.float64)
    zeros = np.zeros_like(p_curr)
    if p_prev is None:
        return DerivativePair(zeros, zeros.copy(), kind, window_index)
    p_prev = np.asarray(p_prev, dtype=np.float64)
    if p_prev.shape != p_curr.shape:
        raise DimensionMismatch(f'score vectors of length {len(p_prev)} and {len(p_curr)}')
    d1 = (p_curr - p_prev) / dt
    if p_prev2 is None:
        d2 = zeros
    else:
        d2 = (p_curr - 2 * p_prev + np.asarray(p_prev2, dtype=np.float64)) / dt ** 2
    return DerivativePair(d1, d2, kind, window_index)


def normalize_and_update(values, stats, std_floor=1e-12):
    """
    Z-normalize values per node with the statistics of previous windows only,
    then fold the values into the statistics.

    Nodes with fewer than two previous values or a degenerate deviation get 0.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape != stats.mean.shape:
        raise DimensionMismatch(f'{len(values)} values for {len(stats.mean)} nodes')
    normalized = np.zeros_like(values)
    if stats.count >= 2:
        std = stats.std
        valid = std >= std_floor
        normalized[valid] = (values[valid] - stats.mean[valid]) / std[valid]
    stats.update(values)
    return normalized


def attribute(dp_s, dp_w, normalized, topk):
    """
    Rank nodes by the largest absolute normalized derivative over all
    channels.

    Args:
        dp_s: DerivativePair of the structural score or None.
        dp_w: DerivativePair of the weighted score or None.
        normalized: Dictionary channel -> normalized values.
        topk: Number of nodes to return.

    Returns:
        List of NodeAttribution, ties broken by ascending node id.
    """
    channels = [ch for ch in CHANNELS if ch in normalized]
    if not channels or topk <= 0:
        return []
    n = len(normalized[channels[0]])
    for dp in (dp_s, dp_w):
        if dp is not None and len(dp.d1) != n:
            raise DimensionMismatch(f'derivatives of length {len(dp.d1)} for {n} nodes')
    magnitudes = np.abs(np.vstack([normalized[ch] for ch in channels]))
    best = magnitudes.max(axis=0)
    dominant = magnitudes.argmax(axis=0)
    order = np.lexsort((np.arange(n), -best))[:topk]
    return [NodeAttribution(int(i), float(best[i]), channels[dominant[i]]) for i in order]


def compute_anomaly_score(dp_s, dp_w, stats, topk, warmup=0):
    """
    Turn the derivatives of one window into an AnomalyRecord.

    Each channel is normalized and its absolute values summed; the score
    of a kind is the larger of its two derivative channels and the window
    score the larger of both kinds. A kind that is not computed scores 0.
    Windows before the warm-up has passed are flagged.
    """
    if dp_s is None and dp_w is None:
        raise ValueError('at least one derivative pair is required')
    normalized = {}
    for dp in (dp_s, dp_w):
        if dp is None:
            continue
        for channel, values in dp.channels().items():
            normalized[channel] = normalize_and_update(values, stats[channel], stats.std_floor)

    l1 = {ch: float(np.abs(normalized[ch]).sum()) if ch in normalized else 0.0 for ch in CHANNELS}
    score_s = max(l1['s1'], l1['s2'])
    score_w = max(l1['w1'], l1['w2'])
    in_warmup = stats.windows < warmup
    stats.windows += 1

    window_index = (dp_s if dp_s is not None else dp_w).window_index
    return AnomalyRecord(
        window_index=window_index,
        score=max(score_s, score_w),
        score_s=score_s,
        score_w=score_w,
        l1_d1s=l1['s1'],
        l1_d2s=l1['s2'],
        l1_d1w=l1['w1'],
        l1_d2w=l1['w2'],
        warmup=in_warmup,
        top_nodes=tuple(attribute(dp_s, dp_w, normalized, topk)),
    )
