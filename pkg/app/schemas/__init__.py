# Network Schemas
from app.schemas.network import LinkDescriptor, NetworkSpec, StationDescriptor

# Demand Schemas
from app.schemas.demand import (
    DemandPhase,
    DemandSection,
    GroupSizeDistribution,
    ScenarioKind,
    ScriptedOrder,
)

# Fleet Schemas
from app.schemas.fleet import FleetSection

# Management Schemas
from app.schemas.management import AdaptiveParams, ManagementParams, format_horizon, parse_horizon

# Metrics Schemas
from app.schemas.metrics import CSV_COLUMNS, MetricsReport

# Scenario Schemas
from app.schemas.scenario import RunSection, ScenarioFile
