from .calculus import (
    CycleSlack,
    PairNormReport,
    cycle_inequality,
    find_zero_slack_cycles,
    pair_distance,
    pair_sum_norm,
    rerepresent,
    terms_of,
)
from .support import (
    FMu,
    MuSet,
    MuWitness,
    bisector_kernel,
    check_f_mu_slice_property,
    f_mu,
    lambda_max,
    mu_set,
    support_function,
)
