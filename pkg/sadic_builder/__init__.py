"""Exact pipelines from simple Bratteli diagrams to low-complexity S-adic subshifts."""
from .bratteli import (
    BratteliDiagram,
    SplitResult,
    check_simple,
    path_counts,
    split_level,
    telescope,
    verify_adapted,
)
from .construct import (
    ConstructionResult,
    VerificationReport,
    build_main1,
    build_toeplitz,
    construct,
    threshold,
    verify_construction,
)
from .errors import (
    ConfigError,
    ConstructionError,
    DiagramError,
    DimensionError,
    LanguageError,
    MorphismError,
    SadicError,
    SerializationError,
    SingularMatrixError,
    TargetError,
    ThresholdError,
)
from .exact_linear import (
    ExactMatrix,
    RationalMatrix,
    invert_rational,
    is_divisible,
    is_ers,
    lcm_denominators,
    mat_mul,
)
from .language import (
    ComplexityProfile,
    boshernitzan_bound,
    complexity_bound,
    complexity_profile,
    factors,
    generate_word,
    prefix_stability,
    toeplitz_check,
)
from .morphisms import (
    DirectiveSequence,
    Morphism,
    compose,
    order_lemma_injective,
    read_morphisms,
    verify_recognizability,
)
from .targets import ComplexityTarget, parse_target

__version__ = "0.1.0"
