"""FDD massive MIMO with UL-to-DL angular reciprocity.

Estimates each user's uplink channel support from noisy pilots, interpolates
it to the downlink carrier, sparsifies the active channel through a
beam-selection integer program, probes and estimates the effective downlink
channels, and evaluates greedy zero-forcing sum-rate bounds against a
compressed-sensing (J-OMP) baseline.
"""

from .config import SystemConfig, desk_config, table1_config
from .channel import (
    ChannelSampler,
    ScatteringProfile,
    SupportSet,
    array_response,
    dft_matrix,
    sample_channel,
    theoretical_support,
    variance_vector,
)
from .support import (
    MmvOptions,
    UplinkSnapshotBlock,
    interpolate_scattering_support,
    map_to_dl_support,
    solve_mmv,
    threshold_support,
)
from .sparsify import (
    BeamUserGraph,
    SparsificationPlan,
    build_graph,
    build_plan,
    solve_ilp,
)
from .probe import estimate_effective, generate_probing, jomp_estimate, receive_pilots
from .precode import build_zf, evaluate_rates, greedy_select, rate_bounds_from_gains
from .harness import (
    ExperimentReport,
    ScenarioSpec,
    desk_spec,
    paper_spec,
    read_report,
    run_experiment,
    write_report,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
