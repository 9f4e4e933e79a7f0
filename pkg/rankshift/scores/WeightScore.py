from rankshift.scores.AbstractScore import AbstractScore
from rankshift.solver import batch_score_w, update_score_w


class WeightScore(AbstractScore):
    """
    Weighted score: walks follow edge multiplicities and restarts favour
    nodes with a large out-weight. Reacts to bursts on existing edges.
    """

    kind = 'w'

    def batch(self, state, window_index, initial=None, solver=None):
        return batch_score_w(state, solver or self.solver, window_index, initial)

    def incremental(self, prev, delta):
        return update_score_w(prev, delta, self.solver)
