"""tcm2d: pseudo-spectral solver for a 2D coupled barotropic/baroclinic/
temperature flow, with a verification harness that certifies energy
identities and a priori bounds on computed trajectories."""

__version__ = "0.1.0"

from .errors import (
    BadParams,
    BadSeries,
    BadWindow,
    CflViolation,
    ChecksumMismatch,
    ConfigMismatch,
    ConfigParseError,
    EmptyTrajectory,
    EpsOutOfRange,
    Infeasible,
    NonZeroMean,
    TcmError,
)
from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    advect,
    curl,
    dealias,
    derivative,
    div,
    grad,
    grad_inv_neg_laplacian,
    grad_l4,
    grad_linf,
    inner,
    inv_neg_laplacian,
    laplacian,
    leray_project,
    multiply,
    norm,
    perp_grad,
    riesz_double,
    seminorm,
    smoothing_inverse,
)
from .model import (
    SimConfig,
    SimResult,
    State,
    Tendency,
    imex_step,
    make_initial,
    rhs,
    simulate,
)
from .derived import (
    DerivedBundle,
    ResidualNorms,
    commutator_f,
    commutator_f_gradform,
    derived_bundle,
    pseudo_baroclinic,
    residual_flux_equation,
    residual_phi_equation,
    residual_w_equation,
    temperature_potential,
    viscous_flux,
)
from .records import COLUMNS, DiagnosticsRecord, DiagnosticsSeries, make_record
from .gronwall import (
    ConclusionReport,
    FitResult,
    GronwallSeries,
    HypothesisReport,
    conclusion_check,
    fit_min_k,
    q_of_t,
    verify_hypothesis,
)
from .diagnostics import (
    EnvelopeReport,
    SweepReport,
    TwinReport,
    bgw_ratio,
    certified_envelope,
    commutator_estimate_ratio,
    energy_identity_residual,
    epsilon_sweep,
    h1_temperature_functionals,
    lipschitz_budget,
    lipschitz_budget_curve,
    max_principle_check,
    sweep_configs,
    twin_divergence,
)
