"""Pure-numpy ring sweep: per-robot geometry and pattern flags for one round.

This is the fallback backend; :mod:`chain_gather.kernels._core` implements
the same contract as a compiled extension.  Both must produce identical
flags for identical inputs, which the test suite enforces.

Index conventions (all arrays are ring-indexed, length n):
  * ``ulen[i]``  -- length of the chain vector from robot i-1 to robot i.
  * ``alpha[i]`` -- interior vertex angle at robot i, in [0, pi]; 0.0 at a
    degenerate vertex (a touching neighbour).
  * ``turn[i]``  -- orientation of alpha[i]: -1, 0 or +1.
  * ``chord[i]`` -- distance between robot i's two neighbours.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"

FAMILY_NONE = 0
FAMILY_ANGLE = 1
FAMILY_ORIENTATION = 2
FAMILY_VECTOR_LENGTH = 3


def _shift(a: np.ndarray, k: int) -> np.ndarray:
    """shifted[i] == a[(i + k) % n]"""
    return np.roll(a, -k)


def ring_analysis(
    xs: np.ndarray,
    ys: np.ndarray,
    eps_len: float,
    eps_ang: float,
) -> tuple[np.ndarray, ...]:
    """Compute the per-robot sweep for one configuration snapshot.

    Returns ``(ulen, alpha, turn, chord, ang_eq, turn_uni, len_eq, len_alt,
    pat_family, pat_variant)``.  The window flags cover the visible angles
    alpha[i-3..i+3] and vectors ulen[i-3..i+4]; the pattern columns already
    apply the symmetry-level gating (angle patterns only where angles
    differ, orientation patterns only where sizes agree but turns do not,
    vector patterns only under full angle symmetry).
    """
    n = xs.shape[0]
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)

    dx = xs - np.roll(xs, 1)
    dy = ys - np.roll(ys, 1)
    ulen = np.sqrt(dx * dx + dy * dy)

    # Rays from each vertex toward its neighbours: a = -u_i, b = u_{i+1}.
    ax, ay = -dx, -dy
    bx, by = _shift(dx, 1), _shift(dy, 1)
    cross_u = dx * by - dy * bx          # u_i x u_{i+1}
    dot_rays = ax * bx + ay * by
    degenerate = (ulen <= eps_len) | (_shift(ulen, 1) <= eps_len)
    alpha = np.where(degenerate, 0.0, np.arctan2(np.abs(cross_u), dot_rays))
    turn = np.where(
        degenerate | (np.abs(cross_u) <= eps_ang * ulen * _shift(ulen, 1)),
        0,
        np.sign(cross_u),
    ).astype(np.int8)

    cdx = _shift(xs, 1) - np.roll(xs, 1)
    cdy = _shift(ys, 1) - np.roll(ys, 1)
    chord = np.sqrt(cdx * cdx + cdy * cdy)

    a_win = np.stack([_shift(alpha, k) for k in range(-3, 4)])
    t_win = np.stack([_shift(turn, k) for k in range(-3, 4)])
    l_win = np.stack([_shift(ulen, k) for k in range(-3, 5)])

    ang_eq = (a_win.max(axis=0) - a_win.min(axis=0)) <= eps_ang
    turn_uni = (t_win == t_win[0]).all(axis=0)
    len_eq = (l_win.max(axis=0) - l_win.min(axis=0)) <= eps_len
    two_cycle = np.ones(n, dtype=bool)
    for k in range(6):
        two_cycle &= np.abs(l_win[k] - l_win[k + 2]) <= eps_len
    len_alt = two_cycle & (np.abs(l_win[3] - l_win[4]) > eps_len)

    pat_family = np.zeros(n, dtype=np.int8)
    pat_variant = np.zeros(n, dtype=np.int8)

    am1, a0, ap1 = _shift(alpha, -1), alpha, _shift(alpha, 1)
    ang1 = (am1 > a0 + eps_ang) & (a0 <= ap1 + eps_ang)
    ang2 = (am1 >= a0 - eps_ang) & (a0 < ap1 - eps_ang)
    sel = ~ang_eq
    pat_family[sel & ang1] = FAMILY_ANGLE
    pat_variant[sel & ang1] = 1
    pick2 = sel & ~ang1 & ang2
    pat_family[pick2] = FAMILY_ANGLE
    pat_variant[pick2] = 2

    t = {k: _shift(turn, k) for k in range(-3, 4)}
    nz = {k: t[k] != 0 for k in range(-3, 4)}

    def _same(k1: int, k2: int) -> np.ndarray:
        return nz[k1] & nz[k2] & (t[k1] == t[k2])

    def _opp(k1: int, k2: int) -> np.ndarray:
        return nz[k1] & nz[k2] & (t[k1] != t[k2])

    ori1 = (_same(-1, 1) & _same(1, 2) & _opp(1, 0)) | (
        _same(-2, -1) & _same(-1, 1) & _opp(1, 0)
    )
    ori2 = (_same(-1, 0) & _opp(0, 1) & _same(1, 2) & _same(2, 3)) | (
        _same(1, 0) & _opp(0, -1) & _same(-1, -2) & _same(-2, -3)
    )
    sel = ang_eq & ~turn_uni
    pat_family[sel & ori1] = FAMILY_ORIENTATION
    pat_variant[sel & ori1] = 1
    pick2 = sel & ~ori1 & ori2
    pat_family[pick2] = FAMILY_ORIENTATION
    pat_variant[pick2] = 2

    lmin = l_win.min(axis=0)
    l = {k: l_win[k + 3] for k in range(-3, 5)}
    lm0 = l[0] <= lmin + eps_len
    lm1 = l[1] <= lmin + eps_len
    vec1 = (
        lm0
        & (l[-1] > l[0] + eps_len)
        & (l[0] < l[1] - eps_len)
        & (l[0] < l[2] - eps_len)
    ) | (
        lm1
        & (l[0] > l[1] + eps_len)
        & (l[1] < l[2] - eps_len)
        & (l[1] < l[3] - eps_len)
    )
    vec2 = ((np.abs(l[-1] - l[0]) <= eps_len) & (l[0] < l[1] - eps_len)) | (
        (l[0] > l[1] + eps_len) & (np.abs(l[1] - l[2]) <= eps_len)
    )
    sel = ang_eq & turn_uni
    pat_family[sel & vec1] = FAMILY_VECTOR_LENGTH
    pat_variant[sel & vec1] = 1
    pick2 = sel & ~vec1 & vec2
    pat_family[pick2] = FAMILY_VECTOR_LENGTH
    pat_variant[pick2] = 2

    return (
        ulen,
        alpha,
        turn,
        chord,
        ang_eq,
        turn_uni,
        len_eq,
        len_alt,
        pat_family,
        pat_variant,
    )
