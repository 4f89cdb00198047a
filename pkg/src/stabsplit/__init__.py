"""Entanglement of stabilizer states and strong super-additivity checks."""

from .bipartite import (
    Bipartition,
    CenterPairForm,
    EntanglementDecomposition,
    EntanglementRank,
    center_and_pairs,
    decompose,
    entanglement_rank,
    local_subgroup,
    pair_count,
)
from .group import (
    ContradictionError,
    InvalidGroupError,
    Membership,
    StabilizerGroup,
    contains,
    echelon_form,
    group_product,
    random_stabilizer,
)
from .measurement import (
    MeasurementOutcome,
    OutcomeKind,
    TraceOutPlan,
    build_trace_out_plan,
    measure,
    trace_out,
)
from .pauli import (
    DimensionError,
    PauliOperator,
    QubitSet,
    acts_trivially_on,
    multiply,
    restrict,
    symplectic_product,
)
from .superadditivity import (
    CodeProjector,
    CompletionError,
    FourWayPartition,
    LocalRefinement,
    SsaReport,
    complete_to_maximal,
    ef_code_projector,
    project_p2,
    refine_local,
    select_measurement_ops,
    verify_ssa,
    verify_ssa_mixed,
)

__version__ = "0.1.0"
