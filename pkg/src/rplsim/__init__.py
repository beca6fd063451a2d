"""Deterministic discrete-event simulator of RPL DODAG routing.

Builds DODAGs under OF0, MRHOF or a hop-freezing secure objective function,
mounts the decreased-rank attack at configurable placements, and measures
delivery, control overhead, churn and a radio-energy proxy.
"""

from .engine import Engine, Rng, RngStreams, SimClockError, US_PER_S, us
from .radio import Frame, LinkModel, Medium, Position, RadioParams, UnknownNodeError
from .objectives import (
    HOP_CLAUSE_EQ, HOP_CLAUSE_LEQ, INFINITE_RANK, MODE_NORMAL, MODE_RESTRICTED,
    MRHOF, OF0, ROOT_RANK, SECOF, ParentCandidate, SecofParams,
    mrhof_select, of0_select, secof_mode, secof_select,
)
from .rpl import (
    DioMessage, EtxEstimator, NeighborRecord, Node, NodeCounters, RplParams,
    Trickle, TrickleParams, compute_hops, compute_rank,
)
from .dataplane import (
    DataPacket, PacketFate, Traffic, check_consistency,
    FATE_DELIVERED, FATE_INCONSISTENCY, FATE_IN_FLIGHT, FATE_LINK_FAILURE,
    FATE_NO_ROUTE, FATE_TTL,
    VERDICT_CONSISTENT, VERDICT_DROP, VERDICT_MARK,
)
from .attack import (
    AttackConfig, PlacementViolation, classify_placement, verify_placement,
)
from .metrics import EnergyAccount, EnergyParams, MetricsCollector, export_csv
from . import topology
from .scenario import (
    ConfigError, ScenarioConfig, SimRun, build_simulation, load_config,
    parse_config, run_scenario, serialize_config, summarize, sweep,
)
