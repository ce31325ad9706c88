"""Independent verification of candidate solutions.

A candidate produced in coefficient space is only trusted after it survives
checks that do not reuse the variational machinery:

* pointwise residual of u'''' + q u'' + F'(u) from exact spectral
  derivatives on an oversampled grid;
* a shooting round trip: integrate the equation as a first-order system
  from the candidate's initial 4-state over one full period [0, 2T] with
  classical RK4 and compare the end state with the start;
* conservation of the first integral along that trajectory.

The same integrator doubles as the blow-up scanner for q <= 0, where theory
forbids non-constant global solutions: numerically we certify the
falsifiable surrogate "escaped a large ball in finite x" and never claim
finite-time blow-up itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .energy import hamiltonian
from .potential import Potential
from .spectral import (
    SpectralField,
    default_grid_size,
    eval_at,
    eval_on_grid,
    osc,
    project_to_field,
    sup_norm,
)

__all__ = [
    "CertifyOptions",
    "SolutionCertificate",
    "BlowupReport",
    "IvpResult",
    "RescaleReport",
    "to_initial_conditions",
    "integrate_ivp",
    "certify",
    "efk_blowup_scan",
    "rescale_check",
    "footnote_scaling_residual",
]


@dataclass(frozen=True)
class CertifyOptions:
    tol_r: float = 1e-4  # residual, relative to 1 + ||u||_inf
    tol_p: float = 1e-6  # periodicity gap after one period
    tol_h: float = 1e-6  # first-integral drift, relative to 1 + |E(0)|
    h: Optional[float] = None  # RK4 step, default 2T/4096
    m: Optional[int] = None  # residual grid, default 64 (N+1) + 1


@dataclass(frozen=True)
class SolutionCertificate:
    residual_sup: float
    periodicity_err: float
    hamiltonian_drift: float
    passed: bool
    sup_norm: float
    e0: float
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "residual_sup": self.residual_sup,
            "periodicity_err": self.periodicity_err,
            "hamiltonian_drift": self.hamiltonian_drift,
            "passed": self.passed,
            "sup_norm": self.sup_norm,
            "e0": self.e0,
            "note": self.note,
        }


@dataclass(frozen=True)
class BlowupReport:
    initial_state: tuple
    escaped: bool
    escape_x: Optional[float]
    max_abs: float

    def to_dict(self) -> dict:
        return {
            "initial_state": list(self.initial_state),
            "escaped": self.escaped,
            "escape_x": self.escape_x,
            "max_abs": self.max_abs,
        }


@dataclass(frozen=True)
class IvpResult:
    xs: np.ndarray
    states: np.ndarray  # shape (len(xs), 4): u, u', u'', u'''
    report: BlowupReport


@dataclass(frozen=True)
class RescaleReport:
    residual_original: float
    residual_rescaled: float
    q_rescaled: float
    osc_value: float
    lam: float

    def to_dict(self) -> dict:
        return {
            "residual_original": self.residual_original,
            "residual_rescaled": self.residual_rescaled,
            "q_rescaled": self.q_rescaled,
            "osc": self.osc_value,
            "lam": self.lam,
        }


def to_initial_conditions(u: SpectralField) -> np.ndarray:
    """4-state (u(0), 0, u''(0), 0); odd derivatives vanish by evenness."""
    u0 = float(eval_at(u, 0.0, 0)[0])
    ddu0 = float(eval_at(u, 0.0, 2)[0])
    return np.array([u0, 0.0, ddu0, 0.0])


def integrate_ivp(p: Potential, q: float, state0, x_max: float, h: float,
                  blowup_threshold: float = 1e6) -> IvpResult:
    """Fixed-step RK4 on (u, u', u'', u''')' = (u', u'', u''', -q u'' - F'(u)).

    Halts as soon as |u| reaches blowup_threshold or the state goes
    non-finite (recorded as escaped at the last finite step); otherwise
    lands exactly on x_max with a final fractional step.
    """
    if h <= 0.0 or x_max <= 0.0:
        raise ValueError("need h > 0 and x_max > 0")
    y = np.array(state0, dtype=float)
    if y.shape != (4,):
        raise ValueError("state0 must be a 4-vector (u, u', u'', u''')")
    f1 = p.f1

    def rhs(s):
        return np.array([s[1], s[2], s[3], -q * s[2] - float(f1(s[0]))])

    n_full = int(math.floor(x_max / h + 1e-12))
    rem = x_max - n_full * h
    steps = [h] * n_full + ([rem] if rem > 1e-12 * x_max else [])

    xs = [0.0]
    states = [y.copy()]
    max_abs = abs(y[0])
    escaped = not np.all(np.isfinite(y)) or abs(y[0]) >= blowup_threshold
    escape_x: Optional[float] = 0.0 if escaped else None
    x = 0.0
    if not escaped:
        for dx in steps:
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dx * k1)
            k3 = rhs(y + 0.5 * dx * k2)
            k4 = rhs(y + dx * k3)
            y_new = y + (dx / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(y_new)):
                escaped = True
                escape_x = x  # overflow: escaped at the last finite step
                break
            x += dx
            y = y_new
            xs.append(x)
            states.append(y.copy())
            max_abs = max(max_abs, abs(y[0]))
            if abs(y[0]) >= blowup_threshold:
                escaped = True
                escape_x = x
                break
    report = BlowupReport(
        initial_state=tuple(float(v) for v in np.asarray(state0, dtype=float)),
        escaped=escaped,
        escape_x=escape_x,
        max_abs=float(max_abs),
    )
    return IvpResult(xs=np.asarray(xs), states=np.asarray(states), report=report)


def residual_values(u: SpectralField, p: Potential, q: float, m: int | None = None) -> np.ndarray:
    """u'''' + q u'' + F'(u) on the oversampled grid, from spectral derivatives."""
    if m is None:
        m = default_grid_size(u.n_modes)
    v0 = eval_on_grid(u, m, 0)
    v2 = eval_on_grid(u, m, 2)
    v4 = eval_on_grid(u, m, 4)
    return v4 + q * v2 + np.asarray(p.f1(v0), dtype=float)


def certify(u: SpectralField, p: Potential, q: float,
            opts: CertifyOptions | None = None) -> SolutionCertificate:
    """Residual + periodicity + first-integral certificate for a candidate."""
    opts = opts or CertifyOptions()
    res_sup = float(np.abs(residual_values(u, p, q, opts.m)).max())
    sup = sup_norm(u)

    two_t = 2.0 * u.T
    h = opts.h if opts.h is not None else two_t / 4096.0
    state0 = to_initial_conditions(u)
    ivp = integrate_ivp(p, q, state0, two_t, h)
    e_vals = hamiltonian(ivp.states, p, q)
    e0 = float(e_vals[0])
    if ivp.report.escaped:
        return SolutionCertificate(
            residual_sup=res_sup,
            periodicity_err=math.inf,
            hamiltonian_drift=float(np.abs(e_vals - e0).max()),
            passed=False,
            sup_norm=sup,
            e0=e0,
            note=f"trajectory escaped at x = {ivp.report.escape_x:.6g} before 2T",
        )
    per_err = float(np.linalg.norm(ivp.states[-1] - state0))
    drift = float(np.abs(e_vals - e0).max())
    passed = (
        res_sup < opts.tol_r * (1.0 + sup)
        and per_err < opts.tol_p
        and drift < opts.tol_h * (1.0 + abs(e0))
    )
    return SolutionCertificate(
        residual_sup=res_sup,
        periodicity_err=per_err,
        hamiltonian_drift=drift,
        passed=passed,
        sup_norm=sup,
        e0=e0,
    )


def efk_blowup_scan(p: Potential, q: float, init_grid: Sequence, x_max: float = 20.0,
                    h: float = 1e-3, threshold: float = 1e6) -> list[BlowupReport]:
    """Integrate every initial state and report whether it escaped.

    Only meaningful for q <= 0 and superquadratic potentials (metadata
    alpha_inf = +inf), where theory predicts every non-equilibrium state
    leaves every bound.  Staying bounded within the x budget is reported as
    escaped=False, i.e. inconclusive, never as a counterexample.
    """
    if q > 0.0:
        raise ValueError(f"blow-up scan is for q <= 0, got q={q:g}")
    if not math.isinf(p.alpha_inf):
        raise ValueError(
            f"{p.name}: blow-up scan needs superquadratic growth metadata "
            f"(alpha_inf = +inf), got alpha_inf = {p.alpha_inf:g}"
        )
    return [integrate_ivp(p, q, s, x_max, h, threshold).report for s in init_grid]


def footnote_scaling_residual(u: SpectralField, p: Potential, q: float, mu: float = 2.0,
                              m: int | None = None) -> float:
    """Residual of w(x) = u(x / sqrt(mu)) against the rescaled equation.

    Stretching x by sqrt(mu) trades the parameters as (q, F) -> (q/mu,
    F/mu^2): if u solves the original equation, w solves
    w'''' + (q/mu) w'' + mu^{-2} F'(w) = 0 identically.  In the cosine basis
    the stretch is exact: same coefficients on the half-period T sqrt(mu).
    """
    if mu <= 0.0:
        raise ValueError("mu must be positive")
    w = SpectralField(u.T * math.sqrt(mu), u.coeffs)
    if m is None:
        m = default_grid_size(w.n_modes)
    v0 = eval_on_grid(w, m, 0)
    v2 = eval_on_grid(w, m, 2)
    v4 = eval_on_grid(w, m, 4)
    r = v4 + (q / mu) * v2 + np.asarray(p.f1(v0), dtype=float) / (mu * mu)
    return float(np.abs(r).max())


def rescale_check(u: SpectralField, p: Potential, q: float, m: int | None = None,
                  osc_tol: float = 1e-6) -> RescaleReport:
    """Check the oscillation-normalized rescaling of a homogeneous solution.

    For F(t) = |t|^r/r, w(x) = u(lam x)/Osc(u) with lam^4 = Osc(u)^(2-r)
    solves the same equation with q replaced by q / Osc(u)^gamma, where
    gamma = r/2 - 1.  w is rebuilt by discrete cosine projection from a
    dense resampling of u (rather than by reusing u's coefficients), so the
    check also exercises the resampling path.
    """
    if p.homogeneity_r is None:
        raise ValueError(f"{p.name}: rescale check needs a homogeneous potential")
    r = p.homogeneity_r
    osc_u = osc(u)
    if osc_u <= osc_tol:
        raise ValueError(f"oscillation {osc_u:.3g} below threshold; rescaling undefined")
    gamma = r / 2.0 - 1.0
    lam = osc_u ** ((2.0 - r) / 4.0)
    q_new = q / osc_u**gamma
    t_new = u.T / lam

    if m is None:
        m = default_grid_size(u.n_modes)
    xs_new = np.linspace(0.0, t_new, m)
    w_samples = eval_at(u, lam * xs_new, 0) / osc_u
    w = project_to_field(w_samples, t_new, u.n_modes)

    w0 = eval_on_grid(w, m, 0)
    w2 = eval_on_grid(w, m, 2)
    w4 = eval_on_grid(w, m, 4)
    res_w = w4 + q_new * w2 + np.abs(w0) ** (r - 2) * w0
    return RescaleReport(
        residual_original=float(np.abs(residual_values(u, p, q, m)).max()),
        residual_rescaled=float(np.abs(res_w).max()),
        q_rescaled=q_new,
        osc_value=osc_u,
        lam=lam,
    )
