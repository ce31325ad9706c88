"""q -> 0 sweep experiments: oscillation bound and scaling-law fits.

A sweep fixes the schedule q T^2 = K (any K > pi^2 keeps every point inside
the admissible window) and, for each q, minimizes the energy, certifies the
result, and compares its oscillation against the envelope bound

    Osc(u)^2 <= q T^2 phi^{-1}(q^2 / 2) = K phi^{-1}(q^2 / 2).

For homogeneous potentials |t|^r/r the minimizers are self-similar along
the schedule, so log Osc against log q is a straight line of slope
1/gamma = 2/(r - 2); fit_scaling recovers it by least squares.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import envelope as env_mod
from .potential import Potential
from .solve import SolveOptions, solve_minimum
from .spectral import SpectralField, osc, seminorms, sup_norm
from .verify import CertifyOptions, certify

__all__ = [
    "SweepRecord",
    "ScalingFit",
    "sweep_q",
    "fit_scaling",
    "sweep_csv",
    "write_sweep_csv",
    "CSV_HEADER",
]

CSV_HEADER = "q,T,sup_norm,osc,bound,energy,converged,certified"


@dataclass(frozen=True)
class SweepRecord:
    q: float
    T: float
    sup_norm: float
    osc: float
    bound: float  # sqrt(q T^2 phi^{-1}(q^2/2))
    energy: float
    converged: bool
    certified: bool

    def csv_row(self) -> str:
        vals = [self.q, self.T, self.sup_norm, self.osc, self.bound, self.energy]
        flags = [self.converged, self.certified]
        return ",".join([repr(float(v)) for v in vals] + [str(bool(b)).lower() for b in flags])

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "T": self.T,
            "sup_norm": self.sup_norm,
            "osc": self.osc,
            "bound": self.bound,
            "energy": self.energy,
            "converged": self.converged,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    predicted: float  # 2 / (r - 2)
    rel_err: float


def _check_sweep_potential(p: Potential) -> None:
    if not p.quasiconvex:
        raise ValueError(f"{p.name}: sweep needs a quasi-convex potential (Argmin F = {{0}})")
    if p.fpp0 != 0.0:
        raise ValueError(f"{p.name}: sweep needs F''(0) = 0, got {p.fpp0:g}")
    if not p.alpha_inf > 0.0:
        raise ValueError(f"{p.name}: sweep needs superquadratic growth (alpha_inf > 0)")


def _check_q_list(q_list: Sequence[float]) -> None:
    qs = list(q_list)
    if any(q <= 0.0 for q in qs):
        raise ValueError("q_list must be positive")
    if any(b >= a for a, b in zip(qs, qs[1:])):
        raise ValueError("q_list must be strictly descending")


def _bound_table(p: Potential, q_max: float, z_scale: float, n: int) -> env_mod.EnvelopeTable:
    """Envelope table whose phi range covers q_max^2/2, grid sized to the data."""
    t_max = max(z_scale, 1e-6)
    for _ in range(60):
        tab = env_mod.h_table(p, t_max, n)
        if tab.phi_vals[-1] >= q_max * q_max / 2.0:
            return tab
        t_max *= 2.0
    raise RuntimeError("could not cover the phi range; potential growth too slow?")


def sweep_q(p: Potential, q_list: Sequence[float], K: float,
            opts: SolveOptions | None = None,
            certify_opts: CertifyOptions | None = None,
            table_n: int = 4097,
            keep_fields: Optional[list] = None) -> list[SweepRecord]:
    """Run the q -> 0 experiment on the schedule T = sqrt(K / q).

    Requires a quasi-convex potential with F''(0) = 0 and alpha_inf > 0, and
    K > pi^2 (the schedule then satisfies q T^2 = K > pi^2 at every point).
    Records are emitted in q_list order; pass keep_fields=[] to also collect
    the minimizer fields.
    """
    _check_sweep_potential(p)
    if not K > math.pi**2:
        raise ValueError(f"need K > pi^2 = {math.pi ** 2:.6g}, got K = {K:g}")
    _check_q_list(q_list)
    opts = opts or SolveOptions()
    certify_opts = certify_opts or CertifyOptions()

    results = []
    z_scale = 0.0
    for q in q_list:
        T = math.sqrt(K / q)
        res = solve_minimum(p, q, T, opts)
        cert = certify(res.field, p, q, certify_opts)
        sn = seminorms(res.field)
        z_scale = max(z_scale, sn.int_u2 / T)
        results.append((q, T, res, cert))
        if keep_fields is not None:
            keep_fields.append(res.field)

    records: list[SweepRecord] = []
    if results:
        tab = _bound_table(p, max(q for q, *_ in results), 2.0 * z_scale, table_n)
        for q, T, res, cert in results:
            bound = math.sqrt(K * env_mod.phi_inverse(tab, q * q / 2.0))
            records.append(
                SweepRecord(
                    q=q,
                    T=T,
                    sup_norm=sup_norm(res.field),
                    osc=osc(res.field),
                    bound=bound,
                    energy=res.energy,
                    converged=res.converged,
                    certified=cert.passed,
                )
            )
    return records


def fit_scaling(records: Sequence[SweepRecord], r: float) -> ScalingFit:
    """Least-squares slope of log(osc) against log(q), against 2/(r-2)."""
    usable = [rec for rec in records if rec.osc > 0.0]
    if len(usable) < 3:
        raise ValueError(f"need at least 3 records with positive oscillation, got {len(usable)}")
    if r <= 2.0:
        raise ValueError("scaling exponent needs r > 2")
    lq = np.log([rec.q for rec in usable])
    lo = np.log([rec.osc for rec in usable])
    slope = float(np.polyfit(lq, lo, 1)[0])
    predicted = 2.0 / (r - 2.0)
    return ScalingFit(slope=slope, predicted=predicted, rel_err=abs(slope - predicted) / predicted)


def sweep_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for rec in records:
        buf.write(rec.csv_row() + "\n")
    return buf.getvalue()


def write_sweep_csv(records: Sequence[SweepRecord], path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(sweep_csv(records))
