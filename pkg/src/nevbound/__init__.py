"""nevbound: growth of monodromy matrices of Hamburger Hamiltonians.

The package measures log max_{|z|=R} ||W_H(z)|| for canonical systems with
rank-one piecewise-constant Hamiltonians (the limit-circle / indeterminate
moment problem setting), evaluates explicit upper and lower growth bounds
driven by majorant data, and dispatches closed-form asymptotics for
power-log comparison functions.

Modules
-------
regvar       power-log functions, Karamata integrals, generalized and
             asymptotic inverses, monotone smoothening, index estimation
hamiltonian  the Hamiltonian data model, named families, Jacobi bridge
monodromy    overflow-safe transfer-matrix products and growth measurement
bounds       threshold functions k/h, integrated density, remainder term,
             crossing time, the assembled upper bound and the inverse-type
             lower bound
casebook     closed-form case tables, dispatch by exact exponent
             arithmetic, experiment presets
cli          configuration-driven experiment runner
"""

__version__ = "0.1.0"

from .regvar import (  # noqa: F401
    PowerLogFunction,
    ComparisonFunction,
    power_log,
    pl_eval,
    pl_algebra,
    pl_asymptotic_inverse,
    karamata_integral,
    generalized_inverse,
)
from .hamiltonian import (  # noqa: F401
    HamburgerHamiltonian,
    JacobiParameters,
    new_validated,
    alternating_decay_family,
    prescribed_growth_family,
    jacobi_from_hamiltonian,
    hamiltonian_from_jacobi,
)
from .monodromy import (  # noqa: F401
    ScaledMat2,
    transfer_matrix,
    monodromy_prefix,
    log_max_on_circle,
    growth_profile,
)
from .bounds import (  # noqa: F401
    ComparisonData,
    BoundReport,
    upper_bound_report,
    lower_bound,
    verify_bound_sandwich,
)
from .casebook import (  # noqa: F401
    CaseDiagnosis,
    pure_power_case,
    core_bound_dispatch,
    growth_bound_dispatch,
    summable_weights_bound,
    two_sided_band_check,
    exceptional_fixtures,
    jacobi_presets,
)
from .cli import (  # noqa: F401
    ExperimentConfig,
    load_config,
    run_experiment,
    preset_catalog,
)
