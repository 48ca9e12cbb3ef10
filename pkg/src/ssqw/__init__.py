"""Split-step walk simulator, variational distribution loader, and call pricer."""

from .statevector import (
    MAX_POSITION_QUBITS,
    WalkerState,
    apply_coin,
    initial_state,
    position_distribution,
    state_from_json,
    state_to_json,
)
from .walk import (
    HADAMARD_COIN,
    IDENTITY_COIN,
    PAULI_X_COIN,
    PAULI_Y_COIN,
    PAULI_Z_COIN,
    CoinParams,
    SsqwParams,
    WalkSchedule,
    apply_dtqw_step,
    apply_shift_dtqw,
    apply_shift_minus,
    apply_shift_plus,
    apply_ssqw_step,
    coin_matrix,
    dense_operator,
    dtqw_step_dense,
    evolve,
    operator_to_json,
    ssqw_step_dense,
    wrap_angle,
)
from .target import (
    DistSpec,
    Domain,
    IngestFormatError,
    OptionSpec,
    TargetDistribution,
    UnrepresentableTargetError,
    analytic_histogram,
    bs_lognormal_target,
    ingest_returns,
    sample_histogram,
)
from .optimize import (
    OptimizerConfig,
    TrainingResult,
    mse,
    objective,
    train,
    training_result_json_dict,
)
from .pricing import (
    PayoffReport,
    PriceGrid,
    expected_payoff,
    payoff_csv,
    payoff_report_json_dict,
    payoff_report_to_json,
    price_report,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_POSITION_QUBITS",
    "WalkerState",
    "apply_coin",
    "initial_state",
    "position_distribution",
    "state_from_json",
    "state_to_json",
    "HADAMARD_COIN",
    "IDENTITY_COIN",
    "PAULI_X_COIN",
    "PAULI_Y_COIN",
    "PAULI_Z_COIN",
    "CoinParams",
    "SsqwParams",
    "WalkSchedule",
    "apply_dtqw_step",
    "apply_shift_dtqw",
    "apply_shift_minus",
    "apply_shift_plus",
    "apply_ssqw_step",
    "coin_matrix",
    "dense_operator",
    "dtqw_step_dense",
    "evolve",
    "operator_to_json",
    "ssqw_step_dense",
    "wrap_angle",
    "DistSpec",
    "Domain",
    "IngestFormatError",
    "OptionSpec",
    "TargetDistribution",
    "UnrepresentableTargetError",
    "analytic_histogram",
    "bs_lognormal_target",
    "ingest_returns",
    "sample_histogram",
    "OptimizerConfig",
    "TrainingResult",
    "mse",
    "objective",
    "train",
    "training_result_json_dict",
    "PayoffReport",
    "PriceGrid",
    "expected_payoff",
    "payoff_csv",
    "payoff_report_json_dict",
    "payoff_report_to_json",
    "price_report",
    "__version__",
]
