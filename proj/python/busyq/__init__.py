"""Busy-period analysis of infinite-server queues and networks.

Thin re-export of the compiled extension; the full API lives in `_busyq`.
"""

from ._busyq import (  # noqa: F401
    AtomicLaw,
    BusyTransform,
    BusyqError,
    ConstantBusyLaw,
    NetworkModel,
    QueueModel,
    ServiceModel,
    SojournTransform,
    Stream,
    beta_const_busy_df,
    beta_const_service_df,
    beta_family_moments,
    beta_general_busy_df,
    busy_moments,
    c_derivatives,
    check_feasibility,
    general_busy_density,
    invert,
    invert_df,
    ks_distance,
    mean_busy_period,
    parse_network_json,
    parse_queue_json,
    recover_service_tail,
    run_acceptance,
    simulate_network,
    simulate_queue,
    sojourn_moments,
    solve_traffic,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
