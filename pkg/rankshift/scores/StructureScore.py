from rankshift.scores.AbstractScore import AbstractScore
from rankshift.solver import batch_score_s, update_score_s


class StructureScore(AbstractScore):
    """
    Structural score: a random walk over distinct out-neighbors with a
    uniform restart. Reacts to edges appearing or vanishing.
    """

    kind = 's'

    def batch(self, state, window_index, initial=None, solver=None):
        return batch_score_s(state, solver or self.solver, window_index, initial)

    def incremental(self, prev, delta):
        return update_score_s(prev, delta, self.solver)
