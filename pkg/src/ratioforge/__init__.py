"""ratioforge: universal and flow-based solvers for set-function ratio problems."""

from .setfn import (
    BasePoint,
    CallableOracle,
    GroundSet,
    Orientation,
    SetFunctionOracle,
    SolverConfig,
    contract,
    duality_gap,
    edmonds_greedy,
    lmo,
    negate,
    restrict,
    shift,
)
from .problems import (
    AnchorSet,
    FlowInstance,
    MembershipInstance,
    ParseError,
    UndirectedGraph,
    WeightedBipartiteGraph,
    anchored_oracle,
    dsg_oracle,
    hnsn_oracle,
    membership_oracle,
    mincut_oracle,
    perturb_membership,
    pmean_oracle,
)
from .universal import (
    ConvergenceTrace,
    frank_wolfe,
    fujishige_wolfe,
    peel_weighted,
    supergreedy_pp,
)
from .extract import (
    Decomposition,
    RatioSolution,
    best_prefix_dense,
    best_prefix_sparse,
    dense_decomposition,
    dinkelbach,
    membership_decide,
    sfm_extract,
    threshold_set,
)
from .flow import (
    CutResult,
    dsg_cut_network,
    edmonds_karp,
    flow_dsg_solver,
    flow_hnsn_solver,
    hnsn_cut_network,
    push_relabel,
)
from .brute import brute_force

__version__ = "0.1.0"
