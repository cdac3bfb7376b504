// Payload shapes of the scengen HTTP API. The UI never derives
// scenario state locally; these mirror the server responses verbatim.

export interface MapSummary {
    map_id: string;
    spacing: number;
    target_length: number;
    junction_count: number;
    crosswalk_count: number;
    traffic_light_count: number;
    total_drivable_length: number;
    bounding_box: [number, number, number, number];
    speed_limit_range: [number, number] | null;
}

export interface GraphNode {
    id: string;
    x: number;
    y: number;
    heading: number;
    s: number;
    road: string;
    lane: number;
    kind: "road_bound" | "pedestrian";
}

export interface GraphEdge {
    from: string;
    to: string;
    relation: "successor" | "left" | "right" | "pedestrian" | "goal";
    length: number;
}

export interface GraphPayload {
    map_id: string;
    spacing: number;
    nodes: GraphNode[];
    edges: GraphEdge[];
}

export interface RegionInfo {
    region_id: string;
    kind: "junction" | "road_segment";
    node_ids: string[];
}

export interface RegionsPayload {
    map_id: string;
    regions: RegionInfo[];
    adjacency: Record<string, string[]>;
}

export interface ActorInfo {
    actor_id: string;
    category: string;
    model: string | null;
    spawn_node: string;
    goal_node: string;
    desired_velocity: number;
    lateral_offset: number;
    is_ego: boolean;
}

export interface EnvironmentInfo {
    weather_preset: string;
    time_of_day: string | number;
}

export interface ScenarioState {
    scenario_id: string;
    map_id: string;
    roi: string[];
    environment: EnvironmentInfo;
    actors: ActorInfo[];
    ego: string | null;
    max_allowable_actors: number;
    eligible_extensions: string[];
    eligible_spawn_nodes: string[];
    undo_depth: number;
}

export interface WeatherPresetInfo {
    id: string;
    name: string;
    implies_time: string | null;
}

export interface ModelInfo {
    id: string;
    category: string;
    name: string;
    length: number;
    width: number;
}

export interface AssetsPayload {
    categories: string[];
    weather_presets: WeatherPresetInfo[];
    models: ModelInfo[];
}

export interface ActorForm {
    category: string;
    model: string | null;
    spawn_node: string;
    goal_node: string;
    desired_velocity: number;
    lateral_offset: number;
}

export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly code: string,
        message: string,
        readonly failures: string[] = [],
        readonly eligible: string[] = [],
    ) {
        super(message);
    }
}
