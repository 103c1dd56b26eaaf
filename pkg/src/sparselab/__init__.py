"""sparselab: shrinkage denoising, LASSO solvers, state-evolution phase
diagrams, and planted-clique recovery, with seeded Monte Carlo experiments."""

__version__ = "0.1.0"

from .errors import NumericFailureError, SingularDesignError
from .models import (
    DesignMatrix,
    ObservationVector,
    PlantedCliqueInstance,
    SparseSignal,
    gaussian_design,
    linear_observe,
    orthogonal_design,
    planted_clique_instance,
    signed_permutation_design,
    sparse_signal,
)
from .shrinkage import (
    MinimaxResult,
    ShrinkageRule,
    gauss_expect,
    hard_threshold,
    minimax_soft,
    soft_threshold,
    soft_threshold_derivative,
    soft_threshold_risk,
    worstcase_soft_risk,
)
from .regression import (
    RiskCurve,
    WaveletCoeffs,
    bias_variance_curve,
    fourier_design,
    haar_forward,
    haar_inverse,
    least_squares,
    ls_risk_formula,
    ortho_denoise,
    universal_threshold,
)
from .lasso import (
    FixedAlpha,
    FixedLambdaCalibrated,
    IterateTrace,
    LassoProblem,
    amp_lasso,
    ista,
    kkt_residual,
    lasso_cost,
    lipschitz_bound,
    rip_constant_bruteforce,
)
from .state_evolution import (
    CustomPrior,
    SEConfig,
    SETrace,
    ThreePointPrior,
    lasso_asymptotic_risk,
    phase_boundary,
    se_fixed_point,
    se_map,
    se_trace,
)
from .clique import (
    CliqueEstimate,
    CliqueSETrace,
    amp_clique,
    clique_se_trace,
    degree_heuristic,
    is_clique,
    load_edge_list,
    overlap,
    save_edge_list,
    spectral_clique,
)
from .experiments import (
    PlotSpec,
    ResultTable,
    RunConfig,
    UsageError,
    emit_csv,
    emit_svg_plot,
    load_config,
    parse_csv,
    run_experiment,
)
