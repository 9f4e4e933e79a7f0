from dataclasses import dataclass

import numpy as np
from rankshift.errors import ConfigError, DimensionMismatch, NonConvergence


@dataclass(frozen=True)
class SolverConfig:
    """Parameters shared by the batch and incremental solvers."""

    c: float = 0.5
    epsilon: float = 1e-3
    max_iters: int = 1000

    def __post_init__(self):
        if not 0 < self.c < 1:
            raise ConfigError(f'damping factor must be in (0, 1), got {self.c}')
        if self.epsilon <= 0:
            raise ConfigError(f'epsilon must be positive, got {self.epsilon}')
        if self.max_iters < 1:
            raise ConfigError(f'max_iters must be at least 1, got {self.max_iters}')

    @classmethod
    def from_config(cls, config):
        cfg = config.configuration
        return cls(c=cfg['Damping'], epsilon=cfg['Epsilon'], max_iters=cfg['MaxIters'])


@dataclass(frozen=True)
class ScoreVector:
    """
    Per-node stationary score of one kind ('s' or 'w') after a window.

    The values are copied and made read-only, a vector is never modified
    once published.
    """

    values: np.ndarray
    kind: str
    window_index: int = -1
    iterations: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return len(self.values)

    def l1_distance(self, other):
        return float(np.abs(self.values - np.asarray(other)).sum())


def uniform_start_vector(n):
    return np.full(n, 1.0 / n) if n else np.zeros(0)


def power_iterate(matrix, start, config, initial=None):
    """
    Solve p = c * matrix @ p + (1 - c) * start by fixed point iteration.

    Iteration starts from start (or initial when given) and stops once the
    L1 change between two iterates drops below epsilon.

    Returns:
        Tuple of the solution and the number of iterations used.
    """
    c = config.c
    restart = (1 - c) * start
    p = np.array(start if initial is None else initial, dtype=np.float64)
    for iteration in range(1, config.max_iters + 1):
        following = c * (matrix @ p) + restart
        change = np.abs(following - p).sum()
        p = following
        if change < config.epsilon:
            return p, iteration
    raise NonConvergence(f'no convergence within {config.max_iters} iterations')


def _spread(matrix, active, values):
    """
    Multiply matrix by a vector supported on the active nodes.

    Only the active columns are read, so the cost follows the edges leaving
    the frontier rather than the size of the graph.

    Returns:
        Tuple of the rows reached and the values landing on them.
    """
    block = matrix[:, active]
    contributions = block.data * np.repeat(values, np.diff(block.indptr))
    rows, inverse = np.unique(block.indices, return_inverse=True)
    return rows, np.bincount(inverse, weights=contributions, minlength=len(rows))


def propagate(matrix, residual, config):
    """
    Sum the series residual + (cM) residual + (cM)^2 residual + ...

    Terms are added until the L1 norm of the last one falls below epsilon.
    Each term is kept as a sparse frontier (the nodes it reaches) and pushed
    through the columns of those nodes only.

    Returns:
        Tuple of the accumulated vector and the number of propagation steps.
    """
    total = np.array(residual, dtype=np.float64)
    active = np.flatnonzero(total)
    values = total[active]
    steps = 0
    while np.abs(values).sum() >= config.epsilon:
        steps += 1
        if steps > config.max_iters:
            raise NonConvergence(f'propagation did not settle within {config.max_iters} steps')
        active, values = _spread(matrix, active, values)
        values *= config.c
        total[active] += values
    return total, steps


def _renormalize(values):
    """Clamp tiny negative entries left by truncation and rescale to sum 1."""
    values = np.maximum(values, 0.0)
    total = values.sum()
    if total > 0:
        values /= total
    return values


def _check_dimensions(prev, delta):
    n = delta.matrix_s.shape[0]
    if len(prev) != n:
        raise DimensionMismatch(f'score vector of length {len(prev)} for a graph of {n} nodes')


def batch_score_s(state, config, window_index=-1, initial=None):
    """
    Compute the structural score from scratch, p = c A_s p + (1 - c) / n.
    """
    if state.n == 0:
        return ScoreVector(np.zeros(0), 's', window_index)
    start = uniform_start_vector(state.n)
    values, iterations = power_iterate(state.matrix_s, start, config, initial)
    return ScoreVector(values, 's', window_index, iterations)


def batch_score_w(state, config, window_index=-1, initial=None):
    """
    Compute the weighted score from scratch, p = c A_w p + (1 - c) b_w.
    """
    if state.n == 0:
        return ScoreVector(np.zeros(0), 'w', window_index)
    start = state.start_vector_w()
    values, iterations = power_iterate(state.matrix_w, start, config, initial)
    return ScoreVector(values, 'w', window_index, iterations)


def update_score_s(prev, delta, config):
    """
    Update the structural score after a window.

    Only the change c * delta_As @ prev is propagated through the post-window
    matrix; a window without structural change returns prev unchanged.
    """
    _check_dimensions(prev, delta)
    if delta.delta_As.nnz == 0:
        return ScoreVector(prev.values, 's', delta.window_index)
    residual = config.c * (delta.delta_As @ prev.values)
    change, steps = propagate(delta.matrix_s, residual, config)
    return ScoreVector(_renormalize(prev.values + change), 's', delta.window_index, steps)


def update_score_w(prev, delta, config):
    """
    Update the weighted score after a window.

    Both the transition change and the start vector change feed the
    propagated residual.
    """
    _check_dimensions(prev, delta)
    if delta.delta_Aw.nnz == 0 and delta.start_delta.is_zero:
        return ScoreVector(prev.values, 'w', delta.window_index)
    residual = config.c * (delta.delta_Aw @ prev.values) + (1 - config.c) * delta.delta_bw
    change, steps = propagate(delta.matrix_w, residual, config)
    return ScoreVector(_renormalize(prev.values + change), 'w', delta.window_index, steps)
