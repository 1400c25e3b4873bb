from .bipartite import SimulateResult, bvm_sample_and_price, bvm_simulate, prices_from_sample
from .graphic import graphic_matroid_secretary, orientation_tail
from .grouped import (
    ceil_log2,
    grouped_threshold_match,
    naive_grouped_sample_and_price,
    sample_with_groups,
    threshold_exponents,
)
from .hypergraph import hvm_sample_and_price, hvm_sample_probability, hvm_simulate
from .secretary import classical_cutoff, run_classical_secretary, run_grouped_secretary
from .stream import (
    ArrivalStream,
    Decision,
    DecisionLog,
    StreamError,
    binomial_inverse_cdf,
    draw_sample_size,
)
