"""Energy-minimizing transmission schedules for deadline-constrained bursty data.

Offline optimal solvers for static (:func:`schedule_static`) and
block-fading (:func:`schedule_fading`) channels with circuit power, an
online replanning scheme, three baseline heuristics, a brute-force oracle
with a KKT certificate checker, and a randomized benchmark harness.
"""

from .errors import (
    CertificateError,
    GenerationFailed,
    InfeasibleDemand,
    InfeasibleUpdate,
    InstanceError,
    NegativeEffectiveRho,
    SchedulingError,
    StructureMismatch,
    TotalsMismatch,
)
from .heuristics import heuristic1, heuristic2, heuristic3
from .model import (
    ArrivalProcess,
    ChannelTrace,
    DeadlineProcess,
    EpochGrid,
    Instance,
    Schedule,
    build_instance_from_times,
    check_feasible,
    cumulative_curves,
    departure_curve,
    is_feasible,
    is_schedule_feasible,
)
from .online import Batch, OnlineConfig, OnlineState, online_step, simulate_online, stream_from_instance
from .power import SHANNON, CircuitParams, PowerModel, ShannonPower, ee_rate, epoch_departure, epoch_energy, normalize_circuit
from .taut_fading import first_change_w, schedule_fading, solve_water_level
from .taut_static import clip_from_ideal, first_change_r, ideal_schedule, schedule_static
from .verify import check_structure, kkt_certificate, oracle_energy, verify_schedule

__version__ = "0.1.0"
