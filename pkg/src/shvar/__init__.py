"""Variational computation, verification and stress-testing of periodic
solutions of the fourth-order equation u'''' + q u'' + F'(u) = 0."""

from .energy import (
    AdmissibleWindows,
    CoercivityBarrier,
    EnergyReport,
    Window,
    admissible_windows,
    coercivity_barrier,
    grad_j_q,
    hamiltonian,
    j_q,
)
from .envelope import (
    EnvelopeTable,
    PhiNotStrictError,
    SampledFunction,
    argmin_set,
    convex_envelope,
    h_table,
    phi_inverse,
)
from .potential import (
    Potential,
    check_quasiconvex,
    make_builtin,
    parse_potential,
    validate_potential,
)
from .solve import (
    DivergenceError,
    MinimizeResult,
    MountainPassResult,
    PathCollapseError,
    SeedError,
    SolveOptions,
    minimize,
    mountain_pass,
    seed_negative,
    solve_minimum,
)
from .spectral import (
    SpectralField,
    eval_on_grid,
    integrate_composed,
    osc,
    seminorms,
    sup_norm,
)
from .sweep import ScalingFit, SweepRecord, fit_scaling, sweep_q, write_sweep_csv
from .verify import (
    BlowupReport,
    CertifyOptions,
    SolutionCertificate,
    certify,
    efk_blowup_scan,
    footnote_scaling_residual,
    integrate_ivp,
    rescale_check,
    to_initial_conditions,
)

__version__ = "0.1.0"
