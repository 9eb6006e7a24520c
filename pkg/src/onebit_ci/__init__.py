"""1-bit constructive-interference precoding for the multi-user MIMO downlink.

The pipeline: decompose PSK symbols along their decision boundaries
(:mod:`onebit_ci.geometry`), assemble the real-valued constraint matrix whose
rows measure per-user safety margins (:mod:`onebit_ci.ci_matrix`), relax the
1-bit alphabet to its bounding box and solve the max-min program
(:mod:`onebit_ci.lp`), then recover 1-bit vectors by quantization or
branch-and-bound (:mod:`onebit_ci.precoders`). :mod:`onebit_ci.sim` measures
symbol error rates over Rayleigh fading.
"""

from .ci_matrix import (
    CiMatrix,
    DegenerateDecompositionError,
    build_ci_matrix,
    min_scaling,
    scaling_coefficients,
    stack_complex,
    unstack_complex,
)
from .geometry import Constellation, SymbolDecomposition, decompose_symbol, detect, detect_indices
from .lp import (
    BoxedMaxMinLp,
    LpNumericalError,
    RelaxedSolution,
    solve_maxmin,
    solve_restricted,
)
from .precoders import (
    DEFAULT_NODE_BUDGET,
    OneBitVector,
    Partition,
    SearchResult,
    box_problem,
    exhaustive_solve,
    partition_solution,
    precode_ci_relaxed,
    precode_fbb,
    precode_pbb,
    precode_zf_quantized,
    quantize,
    quantize_complex,
    zf_unquantized,
)
from .sim import (
    SWEEP_NODE_BUDGET,
    SerRecord,
    SimCampaign,
    campaign_from_mapping,
    gen_channel,
    load_campaign,
    read_csv,
    run_campaign,
    transmit,
    write_csv,
)

__version__ = "0.1.0"

__all__ = [
    "BoxedMaxMinLp",
    "CiMatrix",
    "Constellation",
    "DEFAULT_NODE_BUDGET",
    "DegenerateDecompositionError",
    "LpNumericalError",
    "OneBitVector",
    "Partition",
    "RelaxedSolution",
    "SWEEP_NODE_BUDGET",
    "SearchResult",
    "SerRecord",
    "SimCampaign",
    "SymbolDecomposition",
    "box_problem",
    "build_ci_matrix",
    "campaign_from_mapping",
    "decompose_symbol",
    "detect",
    "detect_indices",
    "exhaustive_solve",
    "gen_channel",
    "load_campaign",
    "min_scaling",
    "partition_solution",
    "precode_ci_relaxed",
    "precode_fbb",
    "precode_pbb",
    "precode_zf_quantized",
    "quantize",
    "quantize_complex",
    "read_csv",
    "run_campaign",
    "scaling_coefficients",
    "solve_maxmin",
    "solve_restricted",
    "stack_complex",
    "transmit",
    "unstack_complex",
    "write_csv",
    "zf_unquantized",
]
