from .generators import (
    FIGURE2_LEFT,
    FIGURE2_RIGHT,
    WeightLaw,
    exponential,
    gen_figure2,
    gen_groups_counterexample,
    gen_random_bipartite,
    gen_random_graph,
    gen_random_grouped,
    gen_random_hem,
    gen_random_hvm,
    gen_star,
    powerlaw,
    reduce_hem_to_hvm,
    singleton_groups,
    uniform,
)
from .io import InstanceFormatError, dumps_instance, load_instance, loads_instance, save_instance
from .types import (
    EDGE_GROUPS,
    LEFT_VERTEX_GROUPS,
    EdgeSet,
    GroupedInstance,
    HemHypergraph,
    HvmHypergraph,
    Instance,
    InstanceError,
    UndirectedGraph,
    WeightedBipartiteGraph,
    edge_order_key,
)
