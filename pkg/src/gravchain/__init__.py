"""Supply-chain redistribution between distribution centers driven by a
gravitational attraction between surplus and deficit stocks.
"""
from .errors import (
    ConfigError,
    DomainError,
    ExhaustedError,
    ProtocolError,
    ValidationError,
)
from .gravity import (
    CostParams,
    ForceEvaluation,
    UrgencyState,
    evaluate_pair,
    force_matrix,
    pair_force,
    unit_cost,
    urgency_update,
    virtual_radius,
    virtual_step,
)
from .matching import (
    Cluster,
    PriorityKey,
    QueueEntry,
    TransferOrder,
    allocate,
    build_clusters,
    build_priority_queue,
    execute_transfer,
    retire_agents,
)
from .model import (
    Center,
    Commodity,
    HierarchyLabel,
    Relation,
    Role,
    RoleKind,
    apply_inventory_delta,
    classify_role,
    hierarchy_relation,
    signed_mass,
)
from .protocol import (
    ConsumerView,
    DemandAnnouncement,
    NetworkGraph,
    SupplyResponse,
    announce_demand,
    flood,
    next_supplier,
    respond_supply,
    update_global_best,
)
from .records import MetricsRow, TraceEvent
from .scenario import (
    Scenario,
    generate_north_zone,
    parse_scenario,
    read_metrics,
    serialize_scenario,
    write_metrics,
    write_trace,
)
from .sim import RngStream, World, check_termination, init_world, run, sample_arrivals, step

__version__ = "0.1.0"
