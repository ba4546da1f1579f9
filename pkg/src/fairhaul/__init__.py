"""Fair assignment of delivery orders placed on a weighted tree of roads.

The library computes exact minimax shares with non-wasteful witness
allocations, verifies and repairs allocations, checks envy-based fairness,
and generates the instance families used for tightness and stress testing.
"""

from .errors import (
    AllocationFormatError,
    AllocationMismatchError,
    BudgetExceededError,
    FairhaulError,
    InstanceFormatError,
    SolverError,
    TopologyClassError,
)
from .fairness import (
    envy_cycle,
    incompatibility_instances,
    is_ef,
    is_ef1,
    mechanism_failure_instance,
    round_robin,
    star_ef,
    star_ef1,
)
from .generators import (
    gen_3partition_depth2,
    gen_3partition_star,
    gen_binpacking_paths,
    gen_equitable_star,
    gen_ponw_util,
    gen_random_caterpillar,
    gen_random_tree,
    gen_spider,
)
from .model import (
    Allocation,
    Instance,
    SolveReport,
    Topology,
    allocation_costs,
    bundle_cost,
    closure,
    dist_to_hub,
    parse_allocation,
    parse_instance,
    serialize_allocation,
    serialize_instance,
)
from .nonwaste import (
    is_nonwasteful,
    repair_to_nonwasteful,
    verify_nonwasteful,
    verify_nonwasteful_naive,
)
from .oracle import (
    PonwReport,
    brute_force_mms,
    egalitarian_opt,
    enumerate_nonwasteful,
    is_pareto_optimal,
    ponw,
    utilitarian_opt,
)
from .solvers import (
    Budgets,
    IlpGuess,
    LeafType,
    LeafTypeTable,
    TreeReduction,
    decide_share_at_most,
    leaf_types,
    preprocess_hub_leaf,
    reduce_3pvc,
    solve,
    solve_caterpillar,
    solve_internal_ilp,
    solve_leaf_dp,
    solve_path,
    solve_star_unweighted,
    solve_star_weighted,
)
from .structure import classify

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
