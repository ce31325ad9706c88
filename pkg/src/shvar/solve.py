"""Critical-point search for the energy J_q in the cosine coefficient space.

Two routes, matching the two existence regimes:

* minimize: preconditioned nonlinear conjugate gradient with Armijo
  backtracking, for the direct-minimization (superlinear) regime where a
  negative-energy global minimizer exists.
* mountain_pass: discrete path deformation between the trivial field and a
  negative-energy endpoint, for the regime where 0 is a strict local
  minimum and the critical point of interest is a positive-level saddle.

Both finish with a guarded Newton polish on grad J = 0; the basin-scale
iterations only have to land near the critical point, and the polish drives
the gradient to roundoff so that downstream certification (residual,
periodicity round trip) is limited by basis truncation, not solver slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .energy import admissible_windows, coercivity_barrier
from .potential import Potential
from .spectral import SpectralField, default_grid_size, osc, trapezoid_weights, _grid_tables

__all__ = [
    "SolveOptions",
    "MinimizeResult",
    "MountainPassResult",
    "SeedError",
    "DivergenceError",
    "PathCollapseError",
    "seed_negative",
    "minimize",
    "mountain_pass",
    "solve_minimum",
]

DEFAULT_MODES = 64


class SeedError(RuntimeError):
    """No negative-energy field found; carries the best energy seen."""

    def __init__(self, message: str, best_energy: float):
        super().__init__(message)
        self.best_energy = best_energy


class DivergenceError(RuntimeError):
    """Coefficient norm blew past the guard (non-coercive regime?)."""


class PathCollapseError(RuntimeError):
    """Deformation path slid below the coercivity barrier."""


@dataclass(frozen=True)
class SolveOptions:
    n_modes: int = DEFAULT_MODES
    m: Optional[int] = None  # quadrature grid, default 64 (N+1) + 1
    tol_g: float = 1e-8  # converged when ||grad|| < tol_g (1 + |energy|)
    max_iter: int = 20000
    osc_tol: float = 1e-6  # nontriviality threshold on Osc
    armijo_c: float = 1e-4
    polish: bool = True
    polish_steps: int = 12
    divergence_guard: float = 1e8
    track_energy: bool = False
    # mountain-pass specific
    n_nodes: int = 32
    redistribute_every: int = 50
    max_deform: int = 6000
    deform_tol: float = 1e-5  # hand over to polish at this gradient scale


@dataclass(frozen=True)
class MinimizeResult:
    field: SpectralField
    energy: float
    grad_norm: float
    iterations: int
    converged: bool
    nontrivial: bool
    message: str = ""
    energy_history: tuple = ()

    def to_dict(self) -> dict:
        from .spectral import field_to_json

        return {
            "field": field_to_json(self.field),
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "nontrivial": self.nontrivial,
            "message": self.message,
        }


@dataclass(frozen=True)
class MountainPassResult:
    field: SpectralField
    level: float
    grad_norm: float
    path_energies: tuple
    converged: bool
    message: str = ""

    def to_dict(self) -> dict:
        from .spectral import field_to_json

        return {
            "field": field_to_json(self.field),
            "level": self.level,
            "grad_norm": self.grad_norm,
            "path_energies": list(self.path_energies),
            "converged": self.converged,
            "message": self.message,
        }


class _Objective:
    """J_q and derivatives on raw coefficient vectors, tables precomputed."""

    def __init__(self, p: Potential, q: float, T: float, n_modes: int, m: int | None = None):
        self.p = p
        self.q = q
        self.T = T
        self.n = n_modes
        self.m = m if m is not None else default_grid_size(n_modes)
        _, omega, cos_t, _ = _grid_tables(T, n_modes, self.m)
        self.omega = omega
        self.cos_t = cos_t
        self.w = trapezoid_weights(self.m, T)
        self.s = (T / 2.0) * (omega**4 - q * omega**2)  # quadratic diagonal, s_0 = 0
        # diagonal preconditioner: stiffness scale of the quadratic part
        pre = (T / 2.0) * (omega**4 + 1.0)
        pre[0] = T
        self.pre = pre

    def value(self, a: np.ndarray) -> float:
        u = self.cos_t @ a
        return 0.5 * float(self.s @ (a * a)) + float(self.w @ np.asarray(self.p.f0(u), dtype=float))

    def grad(self, a: np.ndarray) -> np.ndarray:
        u = self.cos_t @ a
        return self.s * a + self.cos_t.T @ (self.w * np.asarray(self.p.f1(u), dtype=float))

    def value_and_grad(self, a: np.ndarray):
        u = self.cos_t @ a
        val = 0.5 * float(self.s @ (a * a)) + float(self.w @ np.asarray(self.p.f0(u), dtype=float))
        g = self.s * a + self.cos_t.T @ (self.w * np.asarray(self.p.f1(u), dtype=float))
        return val, g

    def hess(self, a: np.ndarray) -> np.ndarray:
        u = self.cos_t @ a
        d = self.w * np.asarray(self.p.f2(u), dtype=float)
        return np.diag(self.s) + self.cos_t.T @ (self.cos_t * d[:, None])

    def values_batch(self, coeffs: np.ndarray) -> np.ndarray:
        """Energies of several fields at once (rows of coeffs)."""
        u = coeffs @ self.cos_t.T
        quad = 0.5 * (coeffs * coeffs) @ self.s
        return quad + np.asarray(self.p.f0(u), dtype=float) @ self.w

    def field(self, a: np.ndarray) -> SpectralField:
        return SpectralField(self.T, a)


def seed_negative(p: Potential, q: float, T: float, n_modes: int = DEFAULT_MODES,
                  m: int | None = None) -> SpectralField:
    """A field with J_q < 0, from two cosine ladders.

    First tries lam cos(pi x/T) over a geometric lam grid (works when the
    quadratic part is negative and F is small near 0).  If that fails, tries
    mu (cos(pi x/T) - theta) for theta slightly above 1, which pushes the
    field to large negative values where a sublinear F cannot compensate the
    negative quadratic term.  Raises SeedError with the best energy seen if
    both ladders fail.
    """
    obj = _Objective(p, q, T, n_modes, m)

    def pick(candidates: list[np.ndarray]):
        """Lowest-energy negative candidate, unless the negative run reaches
        the end of the ladder (J unbounded along the ray, as for sublinear
        F): then the first negative rung, the smallest workable scale."""
        vals = [obj.value(a) for a in candidates]
        neg = [i for i, v in enumerate(vals) if v < 0.0]
        if not neg:
            return None, min(vals)
        if neg[-1] == len(vals) - 1:
            i = neg[0]
        else:
            i = min(neg, key=lambda j: vals[j])
        return candidates[i], vals[i]

    def mode_field(a0: float, a1: float) -> np.ndarray:
        a = np.zeros(n_modes + 1)
        a[0] = a0
        a[1] = a1
        return a

    best_val = math.inf
    best, best_val = pick([mode_field(0.0, lam) for lam in 2.0 ** np.arange(-16, 17)])
    if best is None:
        for theta in (1.05, 1.1, 1.25):
            cand, val = pick([mode_field(-mu * theta, mu) for mu in 2.0 ** np.arange(-4, 26)])
            if cand is not None:
                best, best_val = cand, val
                break
            best_val = min(best_val, val)
    if best is None:
        win = admissible_windows(p, q)
        raise SeedError(
            f"no negative-energy seed for {p.name} at q={q:g}, T={T:g} "
            f"(best energy {best_val:.6g}; T-window {win.T_of_q}, regime {win.regime})",
            best_energy=best_val,
        )
    return obj.field(best)


def _armijo(obj: _Objective, a, val, g, d, step0, c1):
    """Backtracking line search; returns (step, new_a, new_val) or None."""
    slope = float(g @ d)
    if slope >= 0.0:
        return None
    step = step0
    for _ in range(60):
        a_new = a + step * d
        v_new = obj.value(a_new)
        if v_new <= val + c1 * step * slope:
            return step, a_new, v_new
        step *= 0.5
    return None


def _newton_polish(obj: _Objective, a: np.ndarray, steps: int, tol: float):
    """Damped Newton on grad J = 0; accepts only gradient-norm decrease."""
    g = obj.grad(a)
    gn = float(np.linalg.norm(g))
    for _ in range(steps):
        if gn < tol:
            break
        try:
            delta = np.linalg.solve(obj.hess(a), -g)
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(obj.hess(a), -g, rcond=None)
        t = 1.0
        improved = False
        for _ in range(30):
            a_try = a + t * delta
            g_try = obj.grad(a_try)
            gn_try = float(np.linalg.norm(g_try))
            if gn_try < gn:
                a, g, gn = a_try, g_try, gn_try
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return a, g, gn


def minimize(p: Potential, q: float, T: float, init: SpectralField,
             opts: SolveOptions | None = None) -> MinimizeResult:
    """Descend J_q from init with preconditioned Polak-Ribiere NCG.

    The direction is restarted every N+1 iterations (and whenever it fails
    to be a descent direction); Armijo backtracking makes the energy
    non-increasing step by step.  Optional Newton polish at the end.
    """
    opts = opts or SolveOptions()
    n_modes = init.n_modes
    obj = _Objective(p, q, T, n_modes, opts.m)
    a = np.array(init.coeffs, dtype=float)
    val, g = obj.value_and_grad(a)
    gn = float(np.linalg.norm(g))
    history = [val] if opts.track_energy else None

    pg = g / obj.pre
    d = -pg
    gpg = float(g @ pg)
    step0 = 1.0
    it = 0
    message = ""
    converged = gn < opts.tol_g * (1.0 + abs(val))

    while not converged and it < opts.max_iter:
        ls = _armijo(obj, a, val, g, d, step0, opts.armijo_c)
        if ls is None:
            # not a descent direction or line search exhausted: restart once
            d = -pg
            ls = _armijo(obj, a, val, g, d, step0, opts.armijo_c)
            if ls is None:
                message = "line search failed"
                break
        step, a, val = ls
        it += 1
        if history is not None:
            history.append(val)
        if float(np.linalg.norm(a)) > opts.divergence_guard:
            raise DivergenceError(
                f"coefficient norm exceeded {opts.divergence_guard:g} at iteration {it} "
                f"({p.name}, q={q:g}, T={T:g}); q outside the coercive window?"
            )
        g_new = obj.grad(a)
        pg_new = g_new / obj.pre
        gn = float(np.linalg.norm(g_new))
        if gn < opts.tol_g * (1.0 + abs(val)):
            g = g_new
            converged = True
            break
        beta = max(0.0, float(g_new @ (pg_new - pg)) / gpg) if gpg > 0.0 else 0.0
        if it % (n_modes + 1) == 0:
            beta = 0.0
        d = -pg_new + beta * d
        g, pg, gpg = g_new, pg_new, float(g_new @ pg_new)
        step0 = min(1.0, 2.5 * step)

    if opts.polish and converged:
        a, g, gn = _newton_polish(obj, a, opts.polish_steps, 1e-13 * (1.0 + abs(val)))
        val = obj.value(a)
        converged = gn < opts.tol_g * (1.0 + abs(val))

    fld = obj.field(a)
    return MinimizeResult(
        field=fld,
        energy=val,
        grad_norm=gn,
        iterations=it,
        converged=converged,
        nontrivial=osc(fld) > opts.osc_tol,
        message=message,
        energy_history=tuple(history) if history is not None else (),
    )


def _redistribute(path: np.ndarray) -> np.ndarray:
    """Re-spread interior nodes to uniform arc length in coefficient space."""
    seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] == 0.0:
        return path
    target = np.linspace(0.0, cum[-1], path.shape[0])
    out = np.empty_like(path)
    for j in range(path.shape[1]):
        out[:, j] = np.interp(target, cum, path[:, j])
    out[0] = path[0]
    out[-1] = path[-1]
    return out


def mountain_pass(p: Potential, q: float, T: float, endpoint: SpectralField,
                  opts: SolveOptions | None = None) -> MountainPassResult:
    """Saddle search by deforming a discrete path from 0 to the endpoint.

    The path (n_nodes fields, endpoints fixed) starts as the straight
    segment in coefficient space.  Each sweep relaxes the maximal-energy
    node by one backtracked step of the climbing gradient (the component
    along the local path tangent is reversed, so the node moves up the
    ridge and down transversally); every redistribute_every sweeps the
    nodes are re-spread by arc length.  When the max node's gradient is
    small the node is handed to a Newton polish on grad J = 0, which
    converges to the saddle.  The returned level is J_q there.
    """
    opts = opts or SolveOptions()
    n_modes = endpoint.n_modes
    obj = _Objective(p, q, T, n_modes, opts.m)
    end_val = obj.value(np.asarray(endpoint.coeffs, dtype=float))
    if not end_val < 0.0:
        raise ValueError(f"endpoint must have negative energy, got J = {end_val:.6g}")
    barrier = coercivity_barrier(p, q, T).barrier

    n_nodes = max(opts.n_nodes, 4)
    frac = np.linspace(0.0, 1.0, n_nodes)[:, None]
    path = frac * np.asarray(endpoint.coeffs, dtype=float)[None, :]

    best_a = None
    best_gn = math.inf
    step0 = 1.0
    it = 0
    energies = obj.values_batch(path)
    while it < opts.max_deform:
        it += 1
        i = 1 + int(np.argmax(energies[1:-1]))  # interior max only
        a = path[i]
        val = energies[i]
        g = obj.grad(a)
        gn = float(np.linalg.norm(g))
        if gn < best_gn:
            best_gn, best_a = gn, a.copy()
        if gn < opts.deform_tol * (1.0 + abs(val)):
            break
        tau = path[i + 1] - path[i - 1]
        tn = float(np.linalg.norm(tau))
        if tn > 0.0:
            tau /= tn
            d = -g + 2.0 * float(g @ tau) * tau
        else:
            d = -g
        # backtrack on the gradient norm: the climbing direction is not a
        # descent direction for J, but it must approach the critical point
        step = step0
        accepted = False
        for _ in range(40):
            a_try = a + step * d
            gn_try = float(np.linalg.norm(obj.grad(a_try)))
            if gn_try < gn:
                path[i] = a_try
                accepted = True
                break
            step *= 0.5
        if not accepted:
            path[i] = a + 1e-3 * step0 * d  # nudge through flat spots
        energies[i] = obj.value(path[i])
        step0 = min(1.0, 2.5 * step) if accepted else max(step0 * 0.5, 1e-6)
        if it % opts.redistribute_every == 0:
            path = _redistribute(path)
            energies = obj.values_batch(path)
            if float(energies[1:-1].max()) < barrier:
                raise PathCollapseError(
                    f"path maximum {energies[1:-1].max():.6g} fell below the coercivity "
                    f"barrier {barrier:.6g}; the path slid off the ridge"
                )

    a = best_a if best_a is not None else path[1]
    level = obj.value(a)
    a, g, gn = _newton_polish(obj, a, opts.polish_steps + 8, 1e-13 * (1.0 + abs(level)))
    polished = obj.value(a)
    if polished > 0.5 * barrier and abs(polished) < 10.0 * max(abs(level), barrier):
        level = polished
    else:
        # polish escaped the saddle's neighborhood; keep the path node
        a = best_a
        g = obj.grad(a)
        gn = float(np.linalg.norm(g))
        level = obj.value(a)

    energies = obj.values_batch(path)
    converged = gn < opts.tol_g * (1.0 + abs(level)) and level > 0.0
    message = "" if converged else f"deformation stalled at ||grad|| = {gn:.3e}"
    return MountainPassResult(
        field=obj.field(a),
        level=level,
        grad_norm=gn,
        path_energies=tuple(float(e) for e in energies),
        converged=converged,
        message=message,
    )


def solve_minimum(p: Potential, q: float, T: float,
                  opts: SolveOptions | None = None) -> MinimizeResult:
    """seed_negative + minimize, with rescaled-seed restarts.

    If the descent lands on the trivial field although the seed had negative
    energy (cannot happen with monotone descent, but a guard for pathological
    line-search exits), retry from up to three rescaled seeds before
    reporting the best result.
    """
    opts = opts or SolveOptions()
    seed = seed_negative(p, q, T, opts.n_modes, opts.m)
    result = minimize(p, q, T, seed, opts)
    scale = 0.5
    for _ in range(3):
        if result.converged and result.nontrivial:
            return result
        rescaled = SpectralField(T, seed.coeffs * scale)
        retry = minimize(p, q, T, rescaled, opts)
        if retry.energy < result.energy:
            result = retry
        scale *= 4.0
    return result
