"""Scheduling and admission control for a quantum network controller."""

from ._core import (
    ControllerConfig,
    DomainError,
    NetworkConfig,
    NetworkSchedule,
    PacketGenerationTask,
    ScheduleEntry,
    SchedulerState,
    Session,
    analytic_expected_queue,
    binom_cdf,
    compute_schedule,
    default_config,
    hoeffding_min_attempts,
    ks_two_sample,
    min_pga_length,
    naus_q2,
    naus_q3,
    normalise_config,
    packet_success_prob,
    period_from_rate,
    run_experiment,
    seconds_to_slots,
    session_metrics,
    simulate,
)

__all__ = [
    "ControllerConfig",
    "DomainError",
    "NetworkConfig",
    "NetworkSchedule",
    "PacketGenerationTask",
    "ScheduleEntry",
    "SchedulerState",
    "Session",
    "analytic_expected_queue",
    "binom_cdf",
    "compute_schedule",
    "default_config",
    "hoeffding_min_attempts",
    "ks_two_sample",
    "min_pga_length",
    "naus_q2",
    "naus_q3",
    "normalise_config",
    "packet_success_prob",
    "period_from_rate",
    "run_experiment",
    "seconds_to_slots",
    "session_metrics",
    "simulate",
]
