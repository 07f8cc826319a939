"""Multi-view information-theoretic co-clustering for co-occurrence data."""

from .errors import (
    ConsistencyError,
    DimensionError,
    DomainError,
    FormatError,
    InfeasibleConfigError,
    InvariantError,
    LengthError,
    MvitccError,
    NormalizationError,
    ParseError,
    SearchSpaceError,
)
from .metrics import MetricReport, contingency, evaluate, nmi, purity, rand_index
from .probability import (
    ColumnAssignment,
    CoclusterSummary,
    RowAssignment,
    ViewJoint,
    ViewMatrix,
    approx_prob,
    build_summary,
    col_candidate_cost,
    entropy,
    kl_divergence,
    mutual_information,
    normalize,
    row_candidate_cost,
    view_loss,
)
from .solver import (
    FitResult,
    SolverConfig,
    SolverState,
    column_step,
    fit,
    initialize,
    iterate_once,
    objective,
    row_step,
    weight_step,
)
from .synth import SynthDataset, SynthSpec, SynthViewSpec, generate

__version__ = "0.1.0"
