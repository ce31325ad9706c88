"""The variational energy J_q, its gradient, and admissibility windows.

J_q(u) = int_0^T |u''|^2/2 - q |u'|^2/2 + F(u) dx.  The quadratic terms are
evaluated exactly from the cosine coefficients; the nonlinear term by
oversampled trapezoid quadrature.  Critical points of J_q on the cosine
space extend to 2T-periodic classical solutions of u'''' + q u'' + F'(u) = 0.

The window functions translate the potential's growth metadata into the q
and T intervals where the two existence mechanisms operate:

  sublinear route   sqrt(24 alpha_minus) < q < 2 sqrt(F''(0))   (mountain pass)
  superlinear route 2 sqrt(F''(0)) < q < sqrt(2 alpha_inf)      (direct minimum)

with the admissible half-periods T solving pi^2/T^2 inside the open interval
((q - sqrt(q^2 - 4c))/2, (q + sqrt(q^2 - 4c))/2), where c = F''(0) in the
superlinear regime and c = 6 alpha_minus in the sublinear one.  Both
intervals are centered at q/2, so T = pi sqrt(2/q) is always admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .potential import Potential
from .spectral import SpectralField, default_grid_size, eval_on_grid, seminorms, trapezoid_weights

__all__ = [
    "EnergyReport",
    "Window",
    "AdmissibleWindows",
    "CoercivityBarrier",
    "j_q",
    "grad_j_q",
    "hamiltonian",
    "admissible_windows",
    "coercivity_barrier",
    "h_norm",
    "embedding_constant",
]


@dataclass(frozen=True)
class EnergyReport:
    value: float
    quad_dd: float  # 1/2 int |u''|^2
    quad_d: float  # q/2 int |u'|^2
    nonlinear: float  # int F(u)
    grad_norm: float

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "quad_dd": self.quad_dd,
            "quad_d": self.quad_d,
            "nonlinear": self.nonlinear,
            "grad_norm": self.grad_norm,
        }


@dataclass(frozen=True)
class Window:
    lo: float
    hi: float

    @property
    def nonempty(self) -> bool:
        return self.lo < self.hi

    def contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def __str__(self) -> str:
        return f"({self.lo:g}, {self.hi:g})" if self.nonempty else "(empty)"


EMPTY_WINDOW = Window(0.0, 0.0)


@dataclass(frozen=True)
class AdmissibleWindows:
    q_sublinear: Window
    q_superlinear: Window
    T_of_q: Optional[Window]
    regime: Optional[str]  # "sublinear" | "superlinear" | None
    note: str = ""


@dataclass(frozen=True)
class CoercivityBarrier:
    """Radius eps and constant theta with J_q >= theta ||u||^2 on ||u|| <= eps."""

    eps: float
    theta: float
    taylor_radius: float  # largest M with F(t) >= eta F''(0) t^2 / 2 on [-M, M]
    embed_const: float  # C_T with ||u||_inf <= C_T ||u||_{H_T}

    @property
    def barrier(self) -> float:
        return self.theta * self.eps**2


def _quad_coeffs(T: float, n_modes: int, q: float) -> np.ndarray:
    """s_k with quadratic energy = 1/2 sum s_k a_k^2 (s_0 = 0)."""
    omega = np.arange(n_modes + 1) * (math.pi / T)
    return (T / 2.0) * (omega**4 - q * omega**2)


def _nonlinear_grad(u: SpectralField, p: Potential, m: int) -> np.ndarray:
    """Components int F'(u) cos(k pi x/T) dx, k = 0..N (k=0 gives int F'(u))."""
    from .spectral import _grid_tables  # shared cached tables

    _, _, cos_t, _ = _grid_tables(u.T, u.n_modes, m)
    w = trapezoid_weights(m, u.T)
    vals = np.asarray(p.f1(cos_t @ u.coeffs), dtype=float)
    return cos_t.T @ (w * vals)


def grad_j_q(u: SpectralField, p: Potential, q: float, m: int | None = None) -> np.ndarray:
    """Coefficient-space gradient: dJ/da_k = s_k a_k + int F'(u) cos(k pi x/T)."""
    if m is None:
        m = default_grid_size(u.n_modes)
    s = _quad_coeffs(u.T, u.n_modes, q)
    return s * u.coeffs + _nonlinear_grad(u, p, m)


def j_q(u: SpectralField, p: Potential, q: float, m: int | None = None) -> EnergyReport:
    """Evaluate J_q(u) with its three constituents and the gradient norm."""
    if m is None:
        m = default_grid_size(u.n_modes)
    sn = seminorms(u)
    quad_dd = 0.5 * sn.int_ddu2
    quad_d = 0.5 * q * sn.int_du2
    vals = eval_on_grid(u, m, 0)
    w = trapezoid_weights(m, u.T)
    nonlinear = float(w @ np.asarray(p.f0(vals), dtype=float))
    grad = grad_j_q(u, p, q, m)
    return EnergyReport(
        value=quad_dd - quad_d + nonlinear,
        quad_dd=quad_dd,
        quad_d=quad_d,
        nonlinear=nonlinear,
        grad_norm=float(np.linalg.norm(grad)),
    )


def hamiltonian(state, p: Potential, q: float):
    """First integral (q/2)|u'|^2 + u' u''' + F(u) - |u''|^2/2 on raw 4-states.

    Accepts a single 4-tuple or an (..., 4) array of states; constant along
    exact trajectories of the equation.
    """
    y = np.asarray(state, dtype=float)
    u, du, ddu, dddu = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
    val = 0.5 * q * du**2 + du * dddu + np.asarray(p.f0(u), dtype=float) - 0.5 * ddu**2
    return float(val) if val.ndim == 0 else val


def _t_window(q: float, c: float) -> Window:
    """Half-periods with pi^2/T^2 in ((q - sqrt(q^2-4c))/2, (q + sqrt(q^2-4c))/2)."""
    disc = q * q - 4.0 * c
    if disc <= 0.0:
        return EMPTY_WINDOW
    z_lo = (q - math.sqrt(disc)) / 2.0
    z_hi = (q + math.sqrt(disc)) / 2.0
    t_lo = math.pi / math.sqrt(z_hi)
    t_hi = math.pi / math.sqrt(z_lo) if z_lo > 0.0 else math.inf
    return Window(t_lo, t_hi)


def admissible_windows(p: Potential, q: float | None = None) -> AdmissibleWindows:
    """q-windows of both existence regimes, and the T-window of a given q."""
    fpp0 = max(p.fpp0, 0.0)
    q_sub = Window(math.sqrt(24.0 * p.alpha_minus) if math.isfinite(p.alpha_minus) else math.inf,
                   2.0 * math.sqrt(fpp0))
    q_sup_hi = math.inf if math.isinf(p.alpha_inf) else math.sqrt(2.0 * p.alpha_inf)
    q_sup = Window(2.0 * math.sqrt(fpp0), q_sup_hi)

    if q is None:
        return AdmissibleWindows(q_sub, q_sup, None, None)

    if q_sup.contains(q):
        # direct-minimization regime: c = F''(0)
        return AdmissibleWindows(q_sub, q_sup, _t_window(q, fpp0), "superlinear")
    if q_sub.contains(q):
        # mountain-pass regime: c = 6 alpha_minus, i.e. q^2 > 24 alpha_minus
        return AdmissibleWindows(q_sub, q_sup, _t_window(q, 6.0 * p.alpha_minus), "sublinear")
    return AdmissibleWindows(
        q_sub, q_sup, EMPTY_WINDOW, None,
        note=f"q={q:g} outside both windows: sublinear {q_sub}, superlinear {q_sup}",
    )


def h_norm(u: SpectralField) -> float:
    """Norm with square int |u''|^2 + int u^2."""
    sn = seminorms(u)
    return math.sqrt(sn.int_ddu2 + sn.int_u2)


def embedding_constant(T: float, k_max: int = 200_000) -> float:
    """Sharp C_T with sup|u| <= C_T ||u||_{H_T} over all cosine fields.

    The supremum over the unit ball is attained at x = 0 where every mode
    equals one, giving C_T^2 = sum_k 1/w_k with mode weights w_0 = T and
    w_k = ((k pi/T)^4 + 1) T/2.  The series converges like k^-4; truncation
    at k_max leaves a tail below 1e-16 for any sane T.
    """
    k = np.arange(1, k_max + 1)
    omega = k * (math.pi / T)
    total = 1.0 / T + float(np.sum(2.0 / (T * (omega**4 + 1.0))))
    return math.sqrt(total)


def _taylor_radius(p: Potential, eta: float) -> float:
    """Largest M with F(t) >= eta F''(0) t^2/2 sampled on [-M, M]."""
    ts = np.geomspace(1e-8, 1e4, 4096)
    bound = eta * p.fpp0 * ts**2 / 2.0
    bad = np.inf
    for sign in (1.0, -1.0):
        vals = np.asarray(p.f0(sign * ts), dtype=float)
        viol = np.nonzero(vals < bound)[0]
        if viol.size:
            bad = min(bad, ts[viol[0]])
    if math.isinf(bad):
        return float(ts[-1])
    return float(bad * (1.0 - 1e-6))


def coercivity_barrier(p: Potential, q: float, T: float, eta: float = 0.9) -> CoercivityBarrier:
    """Quantitative local coercivity: J_q(u) >= theta ||u||^2 for ||u|| <= eps.

    Follows the Taylor + interpolation proof with explicit constants:
    F >= eta F''(0) t^2/2 on [-M, M], eps = M / C_T, and

        theta = 1/2 max_lam min(1 - lam q, eta F''(0) - q/(4 lam))

    over lam in (q / (4 eta F''(0)), 1/q), nonempty iff q < 2 sqrt(eta F''(0)).
    """
    if p.fpp0 <= 0.0:
        raise ValueError(f"{p.name}: coercivity needs F''(0) > 0 (got {p.fpp0})")
    c = eta * p.fpp0
    if not 0.0 <= q < 2.0 * math.sqrt(c):
        raise ValueError(f"coercivity needs 0 <= q < 2 sqrt(eta F''(0)) = {2 * math.sqrt(c):.4g}")
    m_rad = _taylor_radius(p, eta)
    c_t = embedding_constant(T)
    eps = m_rad / c_t
    if q == 0.0:
        theta = 0.5 * min(1.0, c)
    else:
        # equalizer of the two theta terms; lies in the open interval
        lam = ((1.0 - c) + math.sqrt((1.0 - c) ** 2 + q * q)) / (2.0 * q)
        lam = min(max(lam, q / (4.0 * c) * (1.0 + 1e-12)), (1.0 / q) * (1.0 - 1e-12))
        theta = 0.5 * min(1.0 - lam * q, c - q / (4.0 * lam))
    if theta <= 0.0:
        raise ValueError("coercivity constant collapsed; q too close to 2 sqrt(eta F''(0))")
    return CoercivityBarrier(eps=eps, theta=theta, taylor_radius=m_rad, embed_const=c_t)
