"""Local versus outcome-dependent hidden-variable models, with a reversible-gas entropy lab."""
from .bell import (
    BehaviorTable,
    ContextualDensity,
    LocalModel,
    Responses,
    RetroModel,
    Scenario,
    behavior,
    ch_statistic,
    check_no_signalling,
    chsh_statistic,
    expectation_contextual,
    expectation_local,
    expectation_retro,
    load_model,
    marginalize_context,
    mc_estimate,
    save_model,
)
from .errors import (
    DegenerateContextError,
    NormalizationError,
    SolverError,
    ValidationError,
    VerificationError,
)

__version__ = "0.1.0"
