"""Scalar potentials F with derivatives and quadratic-growth metadata.

Every experiment downstream is parametrized by a potential F (assumed C^2,
bounded below) through three callables (F, F', F'') and a handful of limit
quantities: F''(0), the limsup of F(t)/t^2 as t -> -inf, and the liminf of
F(t)/t^2 as |t| -> inf.  The limits select the admissible (q, T) windows,
so they are supplied analytically per family and never estimated from
samples; limsup/liminf estimation from finitely many points is ill-posed
and a wrong value silently invalidates an experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Potential",
    "QuasiconvexReport",
    "make_builtin",
    "parse_potential",
    "eval",
    "check_quasiconvex",
    "validate_potential",
    "BUILTIN_NAMES",
]

BUILTIN_NAMES = ("power", "quadratic", "quad_plus_quartic", "log_type", "double_well")


@dataclass(frozen=True)
class Potential:
    """A C^2 potential with exact derivatives and analytic growth metadata.

    Quasi-convex families (t F'(t) >= 0) are normalized so F(0) = F'(0) = 0;
    double_well intentionally breaks that normalization and carries
    quasiconvex=False.  alpha_minus / alpha_inf may be +inf.
    """

    name: str
    f0: Callable  # F
    f1: Callable  # F'
    f2: Callable  # F''
    fpp0: float  # F''(0)
    alpha_minus: float  # limsup_{t -> -inf} F(t)/t^2
    alpha_inf: float  # liminf_{|t| -> inf} F(t)/t^2
    homogeneity_r: Optional[float] = None  # r when F(t) = |t|^r / r
    quasiconvex: bool = True


@dataclass(frozen=True)
class QuasiconvexReport:
    ok: bool
    worst_t: float
    worst_value: float


def _power(r: float) -> Potential:
    if r <= 2:
        raise ValueError(f"power potential needs r > 2, got r={r}")

    def f0(t):
        return np.abs(t) ** r / r

    def f1(t):
        return np.abs(t) ** (r - 2) * t

    def f2(t):
        return (r - 1) * np.abs(t) ** (r - 2)

    return Potential(
        name=f"power:{r:g}",
        f0=f0,
        f1=f1,
        f2=f2,
        fpp0=0.0,
        alpha_minus=math.inf,
        alpha_inf=math.inf,
        homogeneity_r=r,
    )


def _quadratic() -> Potential:
    return Potential(
        name="quadratic",
        f0=lambda t: t * t / 2.0,
        f1=lambda t: t * 1.0,
        f2=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        fpp0=1.0,
        alpha_minus=0.5,
        alpha_inf=0.5,
    )


def _quad_plus_quartic() -> Potential:
    return Potential(
        name="quad_plus_quartic",
        f0=lambda t: t * t / 2.0 + t**4 / 4.0,
        f1=lambda t: t + t**3,
        f2=lambda t: 1.0 + 3.0 * t * t,
        fpp0=1.0,
        alpha_minus=math.inf,
        alpha_inf=math.inf,
    )


def _log_type() -> Potential:
    # F(t) = log(1 + t^2/2): quasi-convex, F''(0) = 1, sublinear at infinity.
    def f0(t):
        return np.log1p(np.asarray(t, dtype=float) ** 2 / 2.0)

    def f1(t):
        t = np.asarray(t, dtype=float)
        return t / (1.0 + t * t / 2.0)

    def f2(t):
        t = np.asarray(t, dtype=float)
        d = 1.0 + t * t / 2.0
        return (1.0 - t * t / 2.0) / (d * d)

    return Potential(
        name="log_type",
        f0=f0,
        f1=f1,
        f2=f2,
        fpp0=1.0,
        alpha_minus=0.0,
        alpha_inf=0.0,
    )


def _double_well() -> Potential:
    # F(t) = (1 - t^2)^2, minima at t = +-1.  Not quasi-convex; only used in
    # envelope / argmin experiments.
    return Potential(
        name="double_well",
        f0=lambda t: (1.0 - t * t) ** 2,
        f1=lambda t: 4.0 * t**3 - 4.0 * t,
        f2=lambda t: 12.0 * t * t - 4.0,
        fpp0=-4.0,
        alpha_minus=math.inf,
        alpha_inf=math.inf,
        quasiconvex=False,
    )


def make_builtin(name: str, params: tuple = ()) -> Potential:
    """Construct one of the builtin families.

    power takes one parameter r > 2; the remaining families take none.
    """
    if name == "power":
        if len(params) != 1:
            raise ValueError("power potential takes exactly one parameter r")
        return _power(float(params[0]))
    if params:
        raise ValueError(f"potential {name!r} takes no parameters")
    if name == "quadratic":
        return _quadratic()
    if name == "quad_plus_quartic":
        return _quad_plus_quartic()
    if name == "log_type":
        return _log_type()
    if name == "double_well":
        return _double_well()
    raise ValueError(f"unknown potential {name!r}; builtins: {', '.join(BUILTIN_NAMES)}")


def parse_potential(spec: str) -> Potential:
    """Parse a CLI/config potential string like 'power:4' or 'log_type'."""
    name, _, arg = spec.partition(":")
    params: tuple = ()
    if arg:
        try:
            params = tuple(float(s) for s in arg.split(","))
        except ValueError as exc:
            raise ValueError(f"bad potential parameters in {spec!r}") from exc
    return make_builtin(name.strip(), params)


def eval(p: Potential, t, order: int):
    """Evaluate F (order 0), F' (order 1) or F'' (order 2) at t."""
    if order == 0:
        return p.f0(t)
    if order == 1:
        return p.f1(t)
    if order == 2:
        return p.f2(t)
    raise ValueError(f"order must be 0, 1 or 2, got {order}")


def check_quasiconvex(p: Potential, t_min: float, t_max: float, n: int) -> QuasiconvexReport:
    """Sample t F'(t) on n uniform points and report the worst value.

    ok iff the sampled minimum is >= -1e-12.
    """
    if not (t_min < 0.0 < t_max):
        raise ValueError("need t_min < 0 < t_max")
    if n < 3:
        raise ValueError("need n >= 3 sample points")
    ts = np.linspace(t_min, t_max, n)
    vals = ts * np.asarray(p.f1(ts), dtype=float)
    i = int(np.argmin(vals))
    return QuasiconvexReport(ok=bool(vals[i] >= -1e-12), worst_t=float(ts[i]), worst_value=float(vals[i]))


def validate_potential(p: Potential, rng_seed: int = 0) -> None:
    """Check the normalization and derivative consistency of a potential.

    Raises ValueError on the first violated condition.  Intended for
    user-supplied potentials; the builtins satisfy it by construction.
    """
    if p.quasiconvex:
        if abs(float(p.f0(0.0))) > 1e-12:
            raise ValueError(f"{p.name}: F(0) = {float(p.f0(0.0))!r}, expected 0")
    if abs(float(p.f1(0.0))) > 1e-12:
        raise ValueError(f"{p.name}: F'(0) = {float(p.f1(0.0))!r}, expected 0")

    # F''(0) against a central second difference of F.
    h = 1e-4
    fd = (float(p.f0(h)) - 2.0 * float(p.f0(0.0)) + float(p.f0(-h))) / (h * h)
    if abs(fd - p.fpp0) > 1e-6 * (1.0 + abs(p.fpp0)) + 1e-4 * h:
        raise ValueError(f"{p.name}: fpp0={p.fpp0} disagrees with finite difference {fd}")

    if p.homogeneity_r is not None:
        r = p.homogeneity_r
        rng = np.random.default_rng(rng_seed)
        for _ in range(16):
            lam = float(rng.uniform(0.2, 5.0))
            t = float(rng.uniform(-3.0, 3.0))
            lhs = float(p.f0(lam * t))
            rhs = lam**r * float(p.f0(t))
            if abs(lhs - rhs) > 1e-12 * (1.0 + abs(rhs)):
                raise ValueError(f"{p.name}: homogeneity of degree {r} fails at lam={lam}, t={t}")
