"""
Closed form upper bounds on the raw score derivatives.

The functions are pure calculators. They take the matrix and start vector
change norms of a window (or the size of a change to a single node) and
return how large the first and second order derivatives of the structural
and weighted scores can possibly be.
"""

from dataclasses import dataclass

from rankshift.errors import ConfigError


@dataclass(frozen=True)
class ChangeProfile:
    """
    Size of a change to a single node.

    Attributes:
        dm: Number of edges added (or removed) by the change.
        d2m: Second difference of the change size over consecutive windows.
        k: Distinct out-degree of the changed node.
        m_u: Out-weight of the changed node.
        m: Total weight of the graph.
        dt: Window width.
        c: Damping factor.
    """

    dm: float
    d2m: float = 0.0
    k: int = 1
    m_u: int = 1
    m: int = 1
    dt: float = 1.0
    c: float = 0.5

    def __post_init__(self):
        if self.dm < 0 or self.d2m < 0:
            raise ConfigError(f'change sizes must not be negative, got dm={self.dm} d2m={self.d2m}')
        if self.k < 1 or self.m_u < 1 or self.m < 1:
            raise ConfigError(f'k, m_u and m must be at least 1, got {self.k}, {self.m_u}, {self.m}')
        if self.dt <= 0:
            raise ConfigError(f'dt must be positive, got {self.dt}')
        if not 0 < self.c < 1:
            raise ConfigError(f'damping factor must be in (0, 1), got {self.c}')

    @property
    def ratio(self):
        return damping_ratio(self.c)


def damping_ratio(c):
    """c / (1 - c), the amplification of a matrix change by the random walk."""
    return c / (1 - c)


def bound_structural_delta(dm, k):
    """Largest ||delta A_s||_1 when dm out-edges of a node with k neighbors change."""
    return 2 * dm / k


def bound_weight_delta(dm, m_u, m):
    """
    Bounds on ||delta A_w||_1 and ||delta b_w||_1 when a node with out-weight
    m_u gains dm edges in a graph of total weight m.

    Returns:
        Tuple (aw_bound, bw_bound, aw_exact, bw_exact). The exact values are
        attained when the edges go to a new neighbor of a node that carried
        no weight of the total before.
    """
    return 2 * dm / m_u, 2 * dm / m, 2 * dm / (m_u + dm), 2 * dm / (m + dm)


def weight_delta_exact(dm, m_u, m_uv, m):
    """
    Exact ||delta A_w||_1 and ||delta b_w||_1 when node u (out-weight m_u,
    of which m_uv already on the edge u -> v) gains dm edges to v in a graph
    of total weight m.
    """
    aw = 2 * dm * (m_u - m_uv) / (m_u * (m_u + dm))
    bw = 2 * dm * (m - m_u) / (m * (m + dm))
    return aw, bw


def bound_ps_first(c, l1_dAs, dt):
    """Upper bound of ||p_s'||_1."""
    return damping_ratio(c) * l1_dAs / dt


def bound_ps_second(c, l1_dAs_old, l1_dAs_new, l1_diff, dt):
    """
    Upper bound of ||p_s''||_1 given the matrix changes of two consecutive
    windows and l1_diff = ||delta A_new - delta A_old||_1.
    """
    ratio = damping_ratio(c)
    return (ratio * l1_diff + ratio ** 2 * (l1_dAs_new ** 2 + l1_dAs_old ** 2)) / dt ** 2


def bound_pw_first(c, l1_dAw, l1_dbw, dt):
    """Upper bound of ||p_w'||_1."""
    return (damping_ratio(c) * l1_dAw + l1_dbw) / dt


def bound_pw_second(ps2_max, l1_db_diff, l1_dAw_new, l1_dbw_new, c, dt):
    """
    Upper bound of ||p_w''||_1.

    ps2_max is bound_ps_second evaluated on the weighted matrix changes.
    """
    return ps2_max + (l1_db_diff + damping_ratio(c) * l1_dAw_new * l1_dbw_new) / dt ** 2


def bound_theorem_s(profile):
    """
    First and second derivative bounds of the structural score for a
    structure change to one node.
    """
    ratio = profile.ratio
    rate = profile.dm / profile.dt
    accel = profile.d2m / profile.dt ** 2
    share = 2 / profile.k
    b1 = bound_ps_first(profile.c, bound_structural_delta(profile.dm, profile.k), profile.dt)
    b2 = ratio * share * accel + 2 * ratio ** 2 * share ** 2 * rate ** 2
    return b1, b2


def bound_theorem_w(profile):
    """
    First and second derivative bounds of the weighted score for a weight
    change to one node.
    """
    ratio = profile.ratio
    rate = profile.dm / profile.dt
    accel = profile.d2m / profile.dt ** 2
    b1 = ratio * (2 / profile.m_u) * rate + (2 / profile.m) * rate
    b2 = (ratio * (2 / profile.k) * accel
          + (2 / profile.m) * accel
          + 2 * ratio ** 2 * (2 / profile.k) ** 2 * rate ** 2
          + ratio * (2 / profile.m_u) * (2 / profile.m) * rate ** 2)
    return b1, b2
