from collections import deque

from rankshift.metrics import derivatives
from rankshift.solver import ScoreVector, SolverConfig


# re-anchoring solves to this tolerance regardless of Epsilon
REANCHOR_EPSILON = 1e-10


class AbstractScore:
    """
    Base class of the score plugins.

    A plugin owns one stationary score vector, updates it after every
    closed window and keeps the last three vectors for the derivatives.
    Every ReanchorInterval windows the vector is recomputed by a batch solve
    (warm started from the incremental one) to bound truncation drift. The
    correction is applied to the whole kept history, so re-anchoring never
    shows up in the derivatives.
    """

    kind = None

    def __init__(self, config):
        self.config = config
        self.solver = SolverConfig.from_config(config)
        self.anchor_solver = SolverConfig(c=self.solver.c, epsilon=min(self.solver.epsilon, REANCHOR_EPSILON),
                                          max_iters=max(self.solver.max_iters, 10000))
        self.reanchor_interval = config.configuration['ReanchorInterval']
        self.history = deque(maxlen=3)
        self.current = None
        self.windows = 0
        # propagation steps and batch iterations spent so far
        self.iterations = 0
        self.reanchors = 0

    @property
    def name(self):
        return type(self).__name__

    def start(self, state):
        """Initialize the vector for the (usually empty) starting graph."""
        self.current = self.batch(state, window_index=-1)
        self.history.clear()

    def update(self, state, delta):
        """
        Move the score to the graph after the window described by delta.
        """
        self.windows += 1
        vector = self.incremental(self.current, delta)
        self.iterations += vector.iterations
        self.history.append(vector)
        if self.reanchor_interval and self.windows % self.reanchor_interval == 0:
            vector = self.reanchor(state, vector)
        self.current = vector
        return vector

    def reanchor(self, state, incremental):
        """
        Replace the incremental vector by a tight batch solve.

        The difference is added to every kept vector: the derivatives of the
        window stay those of the incremental update and later windows
        difference against corrected vectors.
        """
        anchored = self.batch(state, incremental.window_index, initial=incremental.values,
                              solver=self.anchor_solver)
        self.iterations += anchored.iterations
        self.reanchors += 1
        correction = anchored.values - incremental.values
        shifted = [ScoreVector(v.values + correction, v.kind, v.window_index, v.iterations) for v in self.history]
        self.history.clear()
        self.history.extend(shifted)
        return anchored

    def derivatives(self, dt=1.0):
        """First and second order derivatives over the kept history."""
        vectors = [v.values for v in self.history]
        while len(vectors) < 3:
            vectors.insert(0, None)
        return derivatives(*vectors, dt=dt, kind=self.kind, window_index=self.current.window_index)

    def batch(self, state, window_index, initial=None, solver=None):
        raise NotImplementedError('batch must be implemented in subclass')

    def incremental(self, prev, delta):
        raise NotImplementedError('incremental must be implemented in subclass')

    def reset(self):
        self.history.clear()
        self.current = None
        self.windows = 0
        self.iterations = 0
        self.reanchors = 0
