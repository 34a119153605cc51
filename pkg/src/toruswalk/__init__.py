"""Random products on the circle over negative time: eta_k = frac(xi_k + eta_{k-1}).

The package classifies a noise sequence into one of three regimes from its
Fourier data (unique solution law / strong solutions / neither), simulates
solution chains reproducibly, and verifies the regime's distributional and
measurability properties as quantified pass/fail tests.
"""

from ._kernels import BACKEND
from .classify import (
    CenteringSpec,
    NoConstructiveCenteringError,
    Regime,
    SubgroupScan,
    SubgroupViolationError,
    TrichotomyResult,
    centering,
    classify,
    persists,
    scan_subgroup,
)
from .measures import (
    ArithmeticStructure,
    Atoms,
    CyclicDistribution,
    Dirac,
    IncompatiblePairError,
    NotOnCyclicGridError,
    PiecewiseDensity,
    TorusMeasure,
    Uniform,
    WrappedGaussian,
    arithmetic_structure,
    convolve,
    cyclic_convolve,
    to_cyclic,
)
from .scenarios import (
    Scenario,
    ScenarioParseError,
    ScenarioValidationError,
    builtin_scenarios,
    get_builtin,
    load_scenario,
)
from .sequences import (
    AlternatingMean,
    ConstantMean,
    ConstantVariance,
    GeometricVariance,
    IidTail,
    IndexOutOfDomainError,
    LogProductStatus,
    LogProductVerdict,
    MeasureSequence,
    PowerLawVariance,
    ScaledDensityTail,
    WrappedGaussianTail,
    ZeroMean,
    tail_log_product,
)
from .simulate import (
    ChainConfig,
    ChainEnsemble,
    DeterministicAnchor,
    HaarConvergence,
    LawAnchor,
    NotStrongRegimeError,
    SkeletonConfig,
    SkeletonEnsemble,
    UniformAnchor,
    centered_products,
    convolution_power,
    exact_cyclic_law,
    mixture_pair,
    simulate,
    skeleton,
    strong_limit,
    translate,
    tv_distance_on_grid,
    window_bias,
)
from .stats import (
    BucketReport,
    CrossCharReport,
    EcfReport,
    MeasurabilityReport,
    RegimeMismatchError,
    ShapeMismatchError,
    TooFewSamplesError,
    bucket_uniformity,
    ecf,
    ecf_threshold,
    independence,
    measurability_check,
    two_sample_ecf_distance,
    uniformity,
)
from .torus import circle_dist, frac, torus_add, torus_neg

__version__ = "0.1.0"
