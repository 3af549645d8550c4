"""Tempered small-world MCMC with empirical long-range proposals.

The package has three layers:

* samplers: the ladder algorithm, its two-chain and swap-tempering
  baselines, the mode-search variant, and the pilot-run ladder tuner;
* spectral: exact finite-chain analysis (conductance, spectral gaps,
  decomposition and mixture bounds, temperature scaling experiments);
* harness/cli: reproducible experiment drivers with trace files.
"""

from .empirical import (
    EmpiricalMeasure,
    drift_bound,
    drift_series,
    load_measure,
    measure_drift,
    save_measure,
)
from .errors import (
    ConfigurationError,
    DiagnosticError,
    DimensionMismatchError,
    NumericalError,
    SteepError,
)
from .phylo import (
    PhyloTarget,
    SequenceAlignment,
    TreeTopology,
    build_two_tree_alignment,
    caterpillar_pair,
    enumerate_topologies,
    exact_topology_posterior,
    nni_distance,
    parse_newick,
    pruning_loglik,
    read_fasta,
    simulate_alignment,
    write_fasta,
)
from .proposals import (
    BallKernel,
    CauchyKernel,
    CompoundNniKernel,
    EmpiricalKernel,
    GaussianKernel,
    InterningKernel,
    LatticeCauchyKernel,
    LatticeStepKernel,
    LatticeUniformKernel,
    NniKernel,
    displacement_sample,
)
from .rng import RngStream, chain_generators
from .samplers import (
    BaselineResult,
    ChainTrace,
    OptimizeResult,
    SteepConfig,
    SteepResult,
    TemperatureLadder,
    convergence_rate_bound,
    geometric_ladder,
    mh_run,
    optimize_run,
    steep_run,
    steep_two_chain_run,
    tempered_jump_log_accept,
    tempering_baseline_run,
    tune_ladder,
)
from .spectral import (
    DiscretizedTarget,
    FiniteChain,
    GridSpec,
    assemble_idealized_sampling_matrix,
    assemble_mh_matrix,
    assemble_small_world_matrix,
    ball_conductance_bound,
    cheeger_check,
    component_chain,
    conductance,
    decomposition_check,
    discretize_target,
    grid_cauchy_proposal,
    grid_local_proposal,
    grid_uniform_proposal,
    mixture_bound_check,
    peak_ratio_check,
    piecewise_normalization_check,
    restricted_chain,
    spectral_gap,
    temperature_scaling_experiment,
    tempered_peak_ratio,
    two_mode_grid_instance,
    uniform_minorization_bounds,
)
from .targets import (
    LatticeTarget,
    MixtureTarget,
    TargetDensity,
    TemperedDensity,
    exponential_target,
    gaussian_ball_mass,
    laplace_mixture_1d,
    log_density_at,
    needles_mixture,
    shifted_ridge_target,
)

__version__ = "0.1.0"
