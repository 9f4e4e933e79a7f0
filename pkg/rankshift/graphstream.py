from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from rankshift.errors import DeleteNonexistentEdge, OutOfOrderTimestamp, UnknownNode
import scipy.sparse as sp


@dataclass(frozen=True)
class EdgeEvent:
    """One timestamped directed edge occurrence, the unit of the stream."""

    src: int
    dst: int
    timestamp: float
    sign: int = 1
    label: bool = False
    # position in the input file, only used for diagnostics
    line: int = field(default=None, compare=False)


class GraphState:
    """
    Cumulative dynamic graph over a fixed universe of n nodes.

    Weights are integers (edge multiplicities) so the state can always be
    reconstructed exactly from the events applied to it. The two column
    stochastic transition matrices (transposed row-normalized adjacency,
    structural and weighted) are derived from the weights and kept in sync by
    close_window(). A node without out-edges is treated as having a single
    self-loop in both matrices. The self-loop carries no weight: such a node
    gets no restart mass in the weighted start vector.
    """

    def __init__(self, n):
        self.n = n
        # per node: destination -> positive integer weight
        self.out_weights = [{} for _ in range(n)]
        self.m_u = np.zeros(n, dtype=np.int64)
        self.m = 0
        self.dangling = n
        self.matrix_s = sp.identity(n, format='csc')
        self.matrix_w = sp.identity(n, format='csc')

    def out_neighbors(self, u):
        return set(self.out_weights[u])

    def k(self, u):
        """Distinct out-degree of node u."""
        return len(self.out_weights[u])

    @property
    def k_u(self):
        return np.fromiter((len(w) for w in self.out_weights), dtype=np.int64, count=self.n)

    def weight(self, u, v):
        return self.out_weights[u].get(v, 0)

    def start_vector_w(self):
        """Out-weight proportional start vector, b_w(i) = m_i / m."""
        return start_vector(self.m_u, self.m)

    def column(self, u, weighted):
        """
        Return column u of the transposed row-normalized adjacency as a
        dict row -> value.
        """
        weights = self.out_weights[u]
        if not weights:
            return {u: 1.0}
        if weighted:
            total = int(self.m_u[u])
            return {v: w / total for v, w in weights.items()}
        share = 1.0 / len(weights)
        return dict.fromkeys(weights, share)

    def transition_matrix(self, weighted):
        """Build the transition matrix from scratch."""
        rows, cols, data = [], [], []
        for u in range(self.n):
            for v, value in self.column(u, weighted).items():
                rows.append(v)
                cols.append(u)
                data.append(value)
        return sp.csc_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def apply(self, u, v, change):
        """Apply a net integer weight change to the edge u -> v."""
        weights = self.out_weights[u]
        was_dangling = not weights
        new_weight = weights.get(v, 0) + change
        if new_weight < 0:
            raise DeleteNonexistentEdge(f'{u} -> {v}')
        if new_weight == 0:
            weights.pop(v, None)
        else:
            weights[v] = new_weight
        self.m_u[u] += change
        self.m += change
        self.dangling += int(not weights) - int(was_dangling)


class WindowBuffer:
    """
    Events of the window currently being filled.

    Besides the events it tracks the net weight change per edge, which is
    needed to validate deletions against edges inserted in the same window.
    """

    def __init__(self, window_index=0, last_timestamp=None):
        self.window_index = window_index
        self.last_timestamp = last_timestamp
        self.events = []
        self.net = defaultdict(int)
        self.insertions = 0
        self.deletions = 0
        self.attack_events = 0

    def __len__(self):
        return len(self.events)

    def next(self, window_index):
        """Return an empty buffer for a following window."""
        return WindowBuffer(window_index, self.last_timestamp)


def start_vector(weights, total):
    """b_w(i) = m_i / m, uniform while the graph carries no weight."""
    n = len(weights)
    if total <= 0:
        return np.full(n, 1.0 / n) if n else np.zeros(0)
    return weights / total


@dataclass(frozen=True)
class StartVectorDelta:
    """
    Change of the weighted start vector b_w during one window.

    Renormalization by the global weight makes the change dense, so only
    the totals, the post-window weights and the nodes whose weight changed
    are stored; the dense vector is built on request.
    """

    old_total: int
    new_total: int
    weights: np.ndarray
    nodes: np.ndarray
    old_weights: np.ndarray

    @property
    def is_zero(self):
        return self.old_total == self.new_total and np.array_equal(self.weights[self.nodes], self.old_weights)

    def materialize(self):
        before = self.weights.copy()
        before[self.nodes] = self.old_weights
        return start_vector(self.weights, self.new_total) - start_vector(before, self.old_total)

    def l1(self):
        """Closed form of ||delta b_w||_1 over the changed nodes."""
        if self.old_total <= 0 or self.new_total <= 0:
            # a uniform vector on one side touches every node
            return float(np.abs(self.materialize()).sum())
        unchanged = self.old_total - int(self.old_weights.sum())
        total = unchanged * abs(1.0 / self.new_total - 1.0 / self.old_total)
        changed = self.weights[self.nodes] / self.new_total - self.old_weights / self.old_total
        return float(total + np.abs(changed).sum())


@dataclass(frozen=True)
class SnapshotDelta:
    """Change of the graph during one window, plus the post-window matrices."""

    window_index: int
    delta_As: sp.csc_matrix
    delta_Aw: sp.csc_matrix
    start_delta: StartVectorDelta
    l1_dAs: float
    l1_dAw: float
    l1_dbw: float
    matrix_s: sp.csc_matrix
    matrix_w: sp.csc_matrix
    events: int = 0
    insertions: int = 0
    deletions: int = 0
    attack_events: int = 0
    changed_nodes: int = 0

    @cached_property
    def delta_bw(self):
        values = self.start_delta.materialize()
        values.setflags(write=False)
        return values


def column_l1(matrix_delta):
    """
    Matrix L1 norm: the maximum over columns of the sum of absolute entries.
    """
    if matrix_delta.nnz == 0:
        return 0.0
    return float(abs(matrix_delta).sum(axis=0).max())


def window_of(timestamp, window, origin=0):
    """Index of the tumbling window a timestamp falls into."""
    return math.floor((timestamp - origin) / window)


def ingest_edge(state, event, pending):
    """
    Validate an event and append it to the pending window buffer.

    The graph state is not touched until the window is closed.
    """
    if pending.last_timestamp is not None and event.timestamp < pending.last_timestamp:
        raise OutOfOrderTimestamp(f'{event.timestamp} after {pending.last_timestamp}', line=event.line)
    for node in (event.src, event.dst):
        if not 0 <= node < state.n:
            raise UnknownNode(f'{node} not in universe of {state.n} nodes', line=event.line)
    if event.sign not in (1, -1):
        raise ValueError(f'invalid sign {event.sign}')

    key = (event.src, event.dst)
    if event.sign < 0:
        if state.weight(*key) + pending.net[key] <= 0:
            raise DeleteNonexistentEdge(f'{event.src} -> {event.dst}', line=event.line)
        pending.deletions += 1
    else:
        pending.insertions += 1
    pending.net[key] += event.sign
    pending.events.append(event)
    pending.last_timestamp = event.timestamp
    if event.label:
        pending.attack_events += 1
    return pending


def _column_difference(old, new):
    rows = sorted(old.keys() | new.keys())
    return rows, [new.get(r, 0.0) - old.get(r, 0.0) for r in rows]


def _replace_columns(matrix, nodes, columns, n):
    """
    Return a copy of matrix with the given (sorted) columns replaced.

    The CSC arrays are spliced: runs of untouched columns are copied as
    contiguous blocks and only the replaced columns are built element by
    element. The copy keeps matrices handed out with earlier deltas intact.
    """
    indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
    lengths = np.diff(indptr).astype(np.int64)
    index_parts, data_parts = [], []
    following = 0
    for u, column in zip(nodes, columns):
        index_parts.append(indices[indptr[following]:indptr[u]])
        data_parts.append(data[indptr[following]:indptr[u]])
        rows = sorted(column)
        index_parts.append(np.array(rows, dtype=indices.dtype))
        data_parts.append(np.array([column[r] for r in rows], dtype=np.float64))
        lengths[u] = len(rows)
        following = u + 1
    index_parts.append(indices[indptr[following]:])
    data_parts.append(data[indptr[following]:])
    new_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(lengths, out=new_indptr[1:])
    return sp.csc_matrix((np.concatenate(data_parts), np.concatenate(index_parts), new_indptr), shape=(n, n))


def _sparse_delta(nodes, old_columns, new_columns, n):
    rows, cols, data = [], [], []
    for u, old, new in zip(nodes, old_columns, new_columns):
        for v, value in zip(*_column_difference(old, new)):
            if value != 0.0:
                rows.append(v)
                cols.append(u)
                data.append(value)
    return sp.csc_matrix((data, (rows, cols)), shape=(n, n))


def close_window(state, pending):
    """
    Apply the buffered events to the graph and return the window's delta.

    Only nodes with a non-zero net change are touched; their columns are
    recomputed from the integer weights before and after the change.
    """
    n = state.n
    by_source = defaultdict(list)
    for (u, v), change in pending.net.items():
        if change:
            by_source[u].append((v, change))
    nodes = sorted(by_source)

    old_s = [state.column(u, False) for u in nodes]
    old_w = [state.column(u, True) for u in nodes]
    old_weights = state.m_u[nodes].copy()
    old_total = state.m

    for u in nodes:
        for v, change in by_source[u]:
            state.apply(u, v, change)

    new_s = [state.column(u, False) for u in nodes]
    new_w = [state.column(u, True) for u in nodes]

    delta_As = _sparse_delta(nodes, old_s, new_s, n)
    delta_Aw = _sparse_delta(nodes, old_w, new_w, n)
    if nodes:
        state.matrix_s = _replace_columns(state.matrix_s, nodes, new_s, n)
        state.matrix_w = _replace_columns(state.matrix_w, nodes, new_w, n)

    weights = state.m_u.copy()
    weights.setflags(write=False)
    start_delta = StartVectorDelta(old_total, state.m, weights,
                                   np.array(nodes, dtype=np.int64), old_weights)

    return SnapshotDelta(
        window_index=pending.window_index,
        delta_As=delta_As,
        delta_Aw=delta_Aw,
        start_delta=start_delta,
        l1_dAs=column_l1(delta_As),
        l1_dAw=column_l1(delta_Aw),
        l1_dbw=start_delta.l1(),
        matrix_s=state.matrix_s,
        matrix_w=state.matrix_w,
        events=len(pending),
        insertions=pending.insertions,
        deletions=pending.deletions,
        attack_events=pending.attack_events,
        changed_nodes=len(nodes),
    )


def iter_windows(events, window, origin=0):
    """
    Group a timestamp sorted event stream into tumbling windows.

    Yields (window_index, events) for every window from the first to the
    last one holding an event, empty windows included.
    """
    current = None
    bucket = []
    for event in events:
        index = window_of(event.timestamp, window, origin)
        if current is None:
            current = index
        if index < current:
            raise OutOfOrderTimestamp(f'{event.timestamp} falls before window {current}', line=event.line)
        while index > current:
            yield current, bucket
            bucket = []
            current += 1
        bucket.append(event)
    if current is not None:
        yield current, bucket
