"""Revival grid, precursor terms, marginal hierarchy, and steady-state traces.

Everything here consumes a TrajectoryPair: the two joint trajectories of the
same collision chain started from two different system states.

The central objects:

  * lhs_grid: the distinguishability-revival grid
        lhs[s][t] = d(t) - d(s),  d(t) = distance between system marginals,
    computed from a single per-step distance series, so the telescoping
    identity lhs[s][t] = lhs[0][t] - lhs[0][s] holds bit for bit.

  * rhs_terms at (s, k): the three precursor terms at reference time s with
    the k oldest retained ancillae traced out -
        env   = B(env marginal of trajectory 1, env marginal of trajectory 2)
        corr1 = B(joint system+env of trajectory 1, product of its marginals)
        corr2 = same for trajectory 2.
    Larger k keeps less of the environment, so each term can only shrink;
    k = window leaves nothing and all three terms are exactly zero.

A windowed run has already discarded most ancillae, so its rhs terms are
lower bounds on the full-environment values ("lower-bound mode"); only
full-history runs support exact bound-validity statements.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import cv_model, dv_model
from .linalg import kron
from .metrics import (
    bures_from_fidelity,
    gaussian_fidelity,
    trace_distance,
    uhlmann_fidelity,
)

__all__ = [
    "TrajectoryPair",
    "InfoDecomposition",
    "BoundReport",
    "simulate_pair",
    "system_distance_series",
    "lhs_grid",
    "rhs_terms",
    "rhs_table",
    "hierarchy_sweep",
    "detect_revivals",
    "info_decomposition",
    "steady_state_trace",
    "analyze",
]


@dataclass(frozen=True)
class TrajectoryPair:
    model: str  # "dv" | "cv"
    snapshots1: tuple
    snapshots2: tuple
    params1: object
    params2: object
    erase: bool = False

    def __post_init__(self):
        if len(self.snapshots1) != len(self.snapshots2):
            raise ValueError("trajectories must have equal length")
        if len(self.snapshots1) != self.steps + 1:
            raise ValueError("expected one snapshot per step plus the initial state")
        shared = ("theta_sa", "theta_aa", "window", "steps", "full_history")
        for name in shared:
            if getattr(self.params1, name) != getattr(self.params2, name):
                raise ValueError(f"trajectories disagree on {name}")

    @property
    def steps(self):
        return self.params1.steps

    @property
    def window(self):
        return self.params1.window


@dataclass(frozen=True)
class InfoDecomposition:
    i_tot: np.ndarray
    i_int: np.ndarray
    i_ext: np.ndarray


@dataclass(frozen=True)
class BoundReport:
    lhs: np.ndarray  # (steps+1, steps+1), zero at t <= s
    levels: tuple
    rhs_env: np.ndarray  # (steps+1, len(levels))
    rhs_corr1: np.ndarray
    rhs_corr2: np.ndarray
    revival_mask: np.ndarray
    revival_summary: tuple  # per-s (s, any, max_revival, first_t)
    f_system: np.ndarray
    f_incoming: np.ndarray
    info: Optional[InfoDecomposition]
    bound_mode: str  # "exact" (full history) | "lower-bound" (windowed)


def _run_trajectory(params, erase):
    if isinstance(params, dv_model.DVParams):
        state, step = dv_model.dv_chain_init(params), dv_model.dv_step
    else:
        state, step = cv_model.cv_chain_init(params), cv_model.cv_step
    snaps = [state]
    for _ in range(params.steps):
        state = step(state, params, erase=erase)
        snaps.append(state)
    return tuple(snaps)


def simulate_pair(config, threads=1):
    """Run both initializations through the identical collision sequence."""
    p1, p2 = config.params(1), config.params(2)
    erase = config.erase_correlations
    if threads >= 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            f1 = pool.submit(_run_trajectory, p1, erase)
            f2 = pool.submit(_run_trajectory, p2, erase)
            snaps1, snaps2 = f1.result(), f2.result()
    else:
        snaps1 = _run_trajectory(p1, erase)
        snaps2 = _run_trajectory(p2, erase)
    return TrajectoryPair(
        model=config.model,
        snapshots1=snaps1,
        snapshots2=snaps2,
        params1=p1,
        params2=p2,
        erase=erase,
    )


def _system_pair(traj, t):
    a, b = traj.snapshots1[t], traj.snapshots2[t]
    if traj.model == "dv":
        return dv_model.dv_system(a), dv_model.dv_system(b)
    return cv_model.cv_system(a), cv_model.cv_system(b)


def _distance(traj, s1, s2, metric):
    if traj.model == "dv":
        if metric == "trace":
            return trace_distance(s1, s2)
        return bures_from_fidelity(uhlmann_fidelity(s1, s2))
    if metric == "trace":
        raise ValueError("trace metric is only defined for the dv model")
    return bures_from_fidelity(
        gaussian_fidelity(s1.cov, s2.cov, s1.mean, s2.mean)
    )


def system_distance_series(traj, metric="bures"):
    out = np.empty(traj.steps + 1)
    for t in range(traj.steps + 1):
        a, b = _system_pair(traj, t)
        out[t] = _distance(traj, a, b, metric)
    return out


def lhs_grid(traj, metric="bures"):
    """lhs[s][t] = d(t) - d(s) for t > s, zero elsewhere.

    Built from the offset series d(x) - d(0) so that the telescoping identity
    lhs[s][t] = lhs[0][t] - lhs[0][s] is exact, not merely within rounding.
    """
    d = system_distance_series(traj, metric)
    d0 = d - d[0]
    n = d.size
    grid = np.zeros((n, n))
    for s in range(n):
        grid[s, s + 1 :] = d0[s + 1 :] - d0[s]
    return grid


def _marginals_dv(snap, slots):
    return dv_model.dv_marginal(snap, slots)


def rhs_terms(traj, s, k):
    """Precursor terms (env, corr1, corr2) at reference step s, level k."""
    snap1, snap2 = traj.snapshots1[s], traj.snapshots2[s]
    n_anc = len(snap1.labels)
    if not 0 <= k <= n_anc:
        raise ValueError(f"hierarchy level {k} outside [0, {n_anc}]")
    env_slots = list(range(1 + k, 1 + n_anc))
    if not env_slots:
        return 0.0, 0.0, 0.0
    if traj.model == "dv":
        e1 = _marginals_dv(snap1, env_slots)
        e2 = _marginals_dv(snap2, env_slots)
        env = bures_from_fidelity(uhlmann_fidelity(e1, e2))
        corr = []
        for snap, env_m in ((snap1, e1), (snap2, e2)):
            joint = _marginals_dv(snap, [0] + env_slots)
            prod = kron(_marginals_dv(snap, [0]), env_m)
            corr.append(bures_from_fidelity(uhlmann_fidelity(joint, prod)))
        return env, corr[0], corr[1]
    e1 = cv_model.cv_marginal(snap1, env_slots)
    e2 = cv_model.cv_marginal(snap2, env_slots)
    env = bures_from_fidelity(
        gaussian_fidelity(e1.cov, e2.cov, e1.mean, e2.mean)
    )
    corr = []
    for snap, env_m in ((snap1, e1), (snap2, e2)):
        joint = cv_model.cv_marginal(snap, [0] + env_slots)
        sys_m = cv_model.cv_marginal(snap, [0])
        dim = joint.cov.shape[0]
        prod_cov = np.zeros((dim, dim))
        prod_cov[:2, :2] = sys_m.cov
        prod_cov[2:, 2:] = env_m.cov
        prod_mean = np.concatenate([sys_m.mean, env_m.mean])
        corr.append(
            bures_from_fidelity(
                gaussian_fidelity(joint.cov, prod_cov, joint.mean, prod_mean)
            )
        )
    return env, corr[0], corr[1]


def rhs_table(traj, levels, threads=1):
    """rhs terms for every s and every level; rows independent, so the
    result is identical for any thread count."""
    levels = tuple(levels)
    n = traj.steps + 1
    env = np.zeros((n, len(levels)))
    corr1 = np.zeros((n, len(levels)))
    corr2 = np.zeros((n, len(levels)))

    def row(s):
        for j, k in enumerate(levels):
            env[s, j], corr1[s, j], corr2[s, j] = rhs_terms(traj, s, k)

    if threads >= 2:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(row, range(n)))
    else:
        for s in range(n):
            row(s)
    return levels, env, corr1, corr2


def hierarchy_sweep(traj, s, levels):
    return [(k,) + rhs_terms(traj, s, k) for k in levels]


def detect_revivals(lhs, eps=1e-9):
    """Boolean revival mask plus a per-row summary.

    summary row: (s, any_revival, max_revival, first_t); max_revival is the
    largest lhs value among revival cells (0.0 when the row has none) and
    first_t is the earliest reviving t (-1 when none).
    """
    if not eps > 0.0:
        raise ValueError("eps must be > 0")
    n = lhs.shape[0]
    mask = np.zeros_like(lhs, dtype=bool)
    summary = []
    for s in range(n):
        row = lhs[s, s + 1 :]
        hits = np.nonzero(row > eps)[0]
        mask[s, s + 1 :] = row > eps
        if hits.size:
            summary.append((s, True, float(row[hits].max()), int(s + 1 + hits[0])))
        else:
            summary.append((s, False, 0.0, -1))
    return mask, tuple(summary)


def info_decomposition(traj):
    """Split the total (joint-state) trace distance into the part visible on
    the system and the remainder held by the environment.

    Exactness needs the entire environment, so this is restricted to dv
    full-history runs small enough for joint trace distances (<= 8 steps).
    """
    if traj.model != "dv":
        raise ValueError("information decomposition is defined for the dv model")
    if not traj.params1.full_history:
        raise ValueError("requires a full-history run (window = steps)")
    if traj.steps > 8:
        raise ValueError("joint states above 8 collisions are too large")
    n = traj.steps + 1
    i_tot = np.empty(n)
    i_int = np.empty(n)
    for t in range(n):
        i_tot[t] = trace_distance(
            traj.snapshots1[t].matrix, traj.snapshots2[t].matrix
        )
        a, b = _system_pair(traj, t)
        i_int[t] = trace_distance(a, b)
    return InfoDecomposition(i_tot=i_tot, i_int=i_int, i_ext=i_tot - i_int)


def _ancilla_reference(traj):
    if traj.model == "dv":
        return dv_model.dv_ancilla(traj.params1.ancilla_excitation)
    return cv_model.thermal_squeezed_cov(traj.params1.ancilla_nbar, 0.0)


def steady_state_trace(traj):
    """Per-step fidelities of trajectory 1 against the fresh-ancilla state:
    (system marginal, incoming-ancilla marginal after its collisions).

    The incoming ancilla at step n is the one labelled n+1; in a
    full-history run it does not exist at the final step (NaN there).
    """
    ref = _ancilla_reference(traj)
    n = traj.steps + 1
    f_system = np.empty(n)
    f_incoming = np.empty(n)
    for t in range(n):
        snap = traj.snapshots1[t]
        sys1, _ = _system_pair(traj, t)
        if traj.model == "dv":
            f_system[t] = uhlmann_fidelity(sys1, ref)
        else:
            f_system[t] = gaussian_fidelity(sys1.cov, ref.cov, sys1.mean, ref.mean)
        if (t + 1) in snap.labels:
            slot = 1 + snap.labels.index(t + 1)
            if traj.model == "dv":
                inc = dv_model.dv_marginal(snap, [slot])
                f_incoming[t] = uhlmann_fidelity(inc, ref)
            else:
                inc = cv_model.cv_marginal(snap, [slot])
                f_incoming[t] = gaussian_fidelity(
                    inc.cov, ref.cov, inc.mean, ref.mean
                )
        else:
            f_incoming[t] = np.nan
    return f_system, f_incoming


def analyze(traj, levels=None, revival_eps=1e-9, metric="bures", threads=1):
    if levels is None:
        levels = range(traj.window + 1)
    grid = lhs_grid(traj, metric)
    levels, env, corr1, corr2 = rhs_table(traj, levels, threads=threads)
    mask, summary = detect_revivals(grid, eps=revival_eps)
    f_system, f_incoming = steady_state_trace(traj)
    info = None
    if traj.model == "dv" and traj.params1.full_history and traj.steps <= 8:
        info = info_decomposition(traj)
    return BoundReport(
        lhs=grid,
        levels=levels,
        rhs_env=env,
        rhs_corr1=corr1,
        rhs_corr2=corr2,
        revival_mask=mask,
        revival_summary=summary,
        f_system=f_system,
        f_incoming=f_incoming,
        info=info,
        bound_mode="exact" if traj.params1.full_history else "lower-bound",
    )
