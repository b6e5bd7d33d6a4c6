"""tailwalk: continuous-time quantum walks on finite Hermitian graphs with
semi-infinite path tails.

The package builds weighted graphs and attaches path tails, decouples the
dynamics into a protected (dark) block plus an eventually-free half-chain via
Krylov tridiagonalization, evolves states with certified truncation, and
detects or certifies perfect state transfer.
"""
from .graphs import (
    Graph, Tail, TailedGraph, RootedPiece, TAIL,
    complete, path, empty_graph, hypercube, krawtchouk_chain, oriented_clique3,
    join, cone, mcone, cartesian, one_sum, rooted_product,
    rooted_product_vertex_maps, series_graph, attach_tail,
    graph_to_json, graph_from_json,
)
from .partitions import (
    Partition, QuotientMatrix, WalkMatrixReport, NotEquitable,
    distance_partition, is_equitable, quotient, quotient_graph,
    walk_matrix, controllability, random_graph,
    partition_to_json, partition_from_json,
)
from .linalg import (
    EigDecomposition, hermitian_eig, expm_apply, HAVE_COMPILED, KERNEL_NAME,
)
from .decouple import (
    JacobiPrefix, DecoupledForm, lanczos, decouple, reduce_multitail,
    verify_decoupling, dark_eigenvalues,
)
from .evolve import (
    State, FidelityCurve, SedentarinessReport, PSTCertificate,
    NoTransferPossible, TruncationError,
    choose_truncation, truncated_operator, evolve, fidelity, fidelity_curve,
    sedentariness, detect_pst, pair_state,
)
from .cube import (
    LatticeOperator, WalkModule, lowering, raising, h_op, zeta_state,
    decompose_cube, clebsch_gordan_square, dark_modules_of_tailed_cube,
)
from .scenarios import (
    ScenarioResult, ScenarioParamError, run_scenario, SCENARIOS,
)

__version__ = "0.1.0"
