"""Graph-based traffic scenario workbench for OpenDRIVE maps.

Pipeline: parse an OpenDRIVE map, sample its drivable lanes into a
directed spawn-node graph (plus an undirected pedestrian graph),
partition the graph into selectable regions, compose scenarios on a
ROI-induced subgraph, and realize them as deterministic bird's-eye
timelines. Everything is cached offline; a CLI and an HTTP service
expose the full workflow.
"""

__version__ = "0.1.0"

from .assets import CATEGORIES, AssetCatalog, load_asset_catalog
from .errors import (
    ConflictError,
    DomainError,
    FormatError,
    NotFoundError,
    ParseError,
    PlanningError,
    ScengenError,
    StaleMapError,
    StructuralError,
    ValidationError,
)
from .graphml import graph_to_graphml, graphml_to_graph
from .lanegraph import (
    LaneGraph,
    build_lane_graph,
    build_pedestrian_graph,
    merge_graphs,
    reachable_set,
    terminal_nodes,
)
from .opendrive import (
    MapMetadata,
    RoadNetwork,
    eval_lane_center,
    eval_reference_line,
    extract_metadata,
    parse_opendrive,
)
from .persist import Workspace, document_to_scenario, scenario_to_document
from .realize import plan_trajectory, realize_scenario, timeline_to_document
from .regions import (
    RegionPartition,
    Roi,
    eligible_extensions,
    expand_roi,
    induced_subgraph,
    segment_regions,
)
from .scenario import (
    ActorSpec,
    EnvironmentConfig,
    MapBundle,
    SamplerConfig,
    Scenario,
    designate_ego,
    export_empty_subgraph,
    goal_candidates,
    max_allowable_actors,
    new_scenario,
    place_actor,
    remove_actor,
    sample_scenario,
)
