"""One-dimensional convex envelopes and the oscillation-bound transforms.

The oscillation bound for energy minimizers runs through the chain

    Ftilde(t) = min(F(t), F(-t)),   G(t) = Ftilde(sqrt(|t|)),
    H = convex envelope of G,       phi(t) = H(t)/t  (phi(0) = 0),

and finally phi^{-1}(q^2/2).  phi is strictly increasing exactly when
F''(0) = 0, which is why the table builder insists on that metadata.

Envelopes are computed as lower convex hulls of sampled graphs.  They are
sensitive to tail behavior (a logarithmic tail drags the envelope of the
whole negative axis to zero), so hulls are taken on a guard window much
wider than the returned table and accuracy is only claimed well inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .potential import Potential

__all__ = [
    "SampledFunction",
    "EnvelopeTable",
    "PhiNotStrictError",
    "convex_envelope",
    "h_table",
    "phi_inverse",
    "argmin_set",
]

GUARD_FACTOR = 50  # hull window half-width, in units of the table range
GUARD_POINTS = 256  # geometric guard nodes per side


class PhiNotStrictError(ValueError):
    """phi is not strictly increasing on the table (F''(0) = 0 fails)."""


@dataclass(frozen=True)
class SampledFunction:
    """Graph samples (ts, vs) on a strictly increasing grid."""

    ts: np.ndarray
    vs: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        vs = np.asarray(self.vs, dtype=float)
        if ts.ndim != 1 or ts.shape != vs.shape:
            raise ValueError("ts and vs must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(vs))):
            raise ValueError("samples must be finite")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("ts must be strictly increasing")
        ts.setflags(write=False)
        vs.setflags(write=False)
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "vs", vs)


@dataclass(frozen=True)
class EnvelopeTable:
    """H and phi sampled on a nonnegative grid; phi_vals[0] = 0."""

    grid: np.ndarray
    h_vals: np.ndarray
    phi_vals: np.ndarray


def _lower_hull_indices(ts: np.ndarray, vs: np.ndarray) -> list[int]:
    """Vertex indices of the lower convex hull, by a monotone-chain pass."""
    hull: list[int] = []
    for i in range(ts.size):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # pop k unless (j, k, i) makes a strict left turn
            cross = (ts[k] - ts[j]) * (vs[i] - vs[j]) - (ts[i] - ts[j]) * (vs[k] - vs[j])
            if cross <= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def convex_envelope(g: SampledFunction) -> SampledFunction:
    """Lower convex hull of the graph points, evaluated back on g's grid."""
    if g.ts.size < 3:
        raise ValueError("need at least 3 sample points")
    idx = _lower_hull_indices(g.ts, g.vs)
    env = np.interp(g.ts, g.ts[idx], g.vs[idx])
    return SampledFunction(g.ts, env)


def _h_input_grid(t_max: float, n: int) -> np.ndarray:
    """Symmetric hull grid: uniform core [-t_max, t_max], geometric guards."""
    core = np.linspace(-t_max, t_max, 2 * (n - 1) + 1)
    guard = np.geomspace(t_max, GUARD_FACTOR * t_max, GUARD_POINTS + 1)[1:]
    return np.concatenate([-guard[::-1], core, guard])


def h_table(p: Potential, t_max: float, n: int = 4097, allow_nonzero_fpp0: bool = False) -> EnvelopeTable:
    """Build H and phi for p on the uniform grid [0, t_max] (n points).

    The hull itself runs over [-GUARD_FACTOR t_max, GUARD_FACTOR t_max] so
    that, for potentials with superquadratic metadata, the finite window
    does not distort H on the returned range.
    """
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    if n < 3:
        raise ValueError("need n >= 3")
    if p.fpp0 != 0.0 and not allow_nonzero_fpp0:
        raise ValueError(
            f"{p.name}: F''(0) = {p.fpp0} != 0; phi will not be strictly increasing "
            "(pass allow_nonzero_fpp0=True to build the table anyway)"
        )
    ts = _h_input_grid(t_max, n)
    s = np.sqrt(np.abs(ts))
    g_vals = np.minimum(np.asarray(p.f0(s), dtype=float), np.asarray(p.f0(-s), dtype=float))
    env = convex_envelope(SampledFunction(ts, g_vals))
    keep = (env.ts >= 0.0) & (env.ts <= t_max * (1.0 + 1e-12))
    grid = env.ts[keep]
    h_vals = env.vs[keep]
    phi = np.zeros_like(h_vals)
    phi[1:] = h_vals[1:] / grid[1:]
    return EnvelopeTable(grid=grid, h_vals=h_vals, phi_vals=phi)


def _check_phi_strict(tab: EnvelopeTable) -> None:
    """Require phi(2t) - phi(t) > 1e-12 for every dyadic grid pair.

    True strict monotonicity cannot be certified from samples; dyadic gaps
    are the operational stand-in.  The table grid is uniform, so the pair
    (i, 2i) realizes t and 2t exactly.
    """
    n = tab.grid.size
    worst = np.inf
    worst_t = 0.0
    for i in range(1, (n - 1) // 2 + 1):
        gap = tab.phi_vals[2 * i] - tab.phi_vals[i]
        if gap < worst:
            worst, worst_t = gap, tab.grid[i]
    if worst <= 1e-12:
        raise PhiNotStrictError(
            f"phi not strictly increasing: phi(2t)-phi(t) = {worst:.3e} at t = {worst_t:.6g}"
        )


def phi_inverse(tab: EnvelopeTable, s: float) -> float:
    """Solve phi(t) = s on the table by bisection plus linear interpolation."""
    if s < 0.0:
        raise ValueError("phi_inverse needs s >= 0")
    _check_phi_strict(tab)
    if s == 0.0:
        return 0.0
    phi = tab.phi_vals
    if s > phi[-1]:
        raise ValueError(f"s = {s:.6g} above table range (phi max = {phi[-1]:.6g})")
    lo, hi = 0, phi.size - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if phi[mid] < s:
            lo = mid
        else:
            hi = mid
    # linear interpolation inside the bracketing cell
    dphi = phi[hi] - phi[lo]
    if dphi <= 0.0:
        return float(tab.grid[hi])
    frac = (s - phi[lo]) / dphi
    return float(tab.grid[lo] + frac * (tab.grid[hi] - tab.grid[lo]))


def argmin_set(g: SampledFunction, tol: float | None = None) -> list[tuple[float, float]]:
    """Maximal grid intervals where vs <= min(vs) + tol, as closed intervals."""
    if tol is None:
        tol = 1e-9 * float(g.vs.max() - g.vs.min())
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    near = g.vs <= g.vs.min() + tol
    intervals: list[tuple[float, float]] = []
    start = None
    for i, flag in enumerate(near):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append((float(g.ts[start]), float(g.ts[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(g.ts[start]), float(g.ts[-1])))
    return intervals
