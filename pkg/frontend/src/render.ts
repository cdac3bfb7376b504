// Bird's-eye 2D canvas rendering of graphs, regions, actors and
// playback frames. Edge and node colors follow the workbench legend:
// successor black, right green, left red, road-bound nodes blue,
// pedestrian elements yellow.

import { Camera } from "./camera.js";
import { TimelineFrame } from "./timeline.js";
import { ActorInfo, GraphPayload, ModelInfo } from "./types.js";

export const COLORS = {
    successor: "#000000",
    right: "#00E279",
    left: "#FF4261",
    pedestrian: "#d4b400",
    goal: "#8a2be2",
    roadNode: "#24A3F2",
    pedestrianNode: "#FFD800",
    roiMember: "#0d47a1",
    eligible: "#9bd7ff",
    rejected: "#ff4261",
    candidate: "#9bd7ff",
    spawnSelected: "#ff8f00",
    dimmed: "#c8c8c8",
    ego: "#e91e63",
};

const CATEGORY_SIZES: Record<string, [number, number]> = {
    normal_vehicle: [4.5, 1.8],
    van: [5.5, 2.0],
    truck: [8.5, 2.5],
    bus: [12.0, 2.55],
    motorcycle: [2.2, 0.8],
    bicycle: [1.8, 0.6],
    pedestrian: [0.6, 0.6],
};

const CATEGORY_COLORS: Record<string, string> = {
    normal_vehicle: "#1565c0",
    van: "#00838f",
    truck: "#4e342e",
    bus: "#6a1b9a",
    motorcycle: "#ef6c00",
    bicycle: "#2e7d32",
    pedestrian: "#f9a825",
};

export interface SceneOptions {
    regionOf?: Map<string, string>;
    roi?: Set<string>;
    eligible?: Set<string>;
    rejectedRegion?: string | null;
    selectedSpawn?: string | null;
    candidates?: Set<string>;
    selectedGoal?: string | null;
    eligibleSpawns?: Set<string>;
    actors?: ActorInfo[];
    models?: ModelInfo[];
    frame?: TimelineFrame | null;
}

export function renderScene(
    ctx: CanvasRenderingContext2D,
    camera: Camera,
    graph: GraphPayload,
    opts: SceneOptions = {},
): void {
    ctx.clearRect(0, 0, camera.viewWidth, camera.viewHeight);
    ctx.fillStyle = "#f7f9fb";
    ctx.fillRect(0, 0, camera.viewWidth, camera.viewHeight);

    const nodes = new Map(graph.nodes.map((n) => [n.id, n]));

    for (const edge of graph.edges) {
        const a = nodes.get(edge.from);
        const b = nodes.get(edge.to);
        if (!a || !b) continue;
        const [ax, ay] = camera.toScreen(a.x, a.y);
        const [bx, by] = camera.toScreen(b.x, b.y);
        ctx.beginPath();
        ctx.moveTo(ax, ay);
        ctx.lineTo(bx, by);
        if (edge.relation === "goal") {
            ctx.strokeStyle = COLORS.goal;
            ctx.setLineDash([6, 4]);
            ctx.lineWidth = 1.5;
        } else {
            ctx.strokeStyle =
                edge.relation === "right" ? COLORS.right
                : edge.relation === "left" ? COLORS.left
                : edge.relation === "pedestrian" ? COLORS.pedestrian
                : COLORS.successor;
            ctx.setLineDash([]);
            ctx.lineWidth = edge.relation === "successor" ? 1.4 : 1.0;
        }
        ctx.stroke();
        ctx.setLineDash([]);
    }

    // goal edges of placed actors (drawn from the server actor list)
    if (opts.actors) {
        ctx.strokeStyle = COLORS.goal;
        ctx.setLineDash([6, 4]);
        ctx.lineWidth = 1.5;
        for (const actor of opts.actors) {
            const a = nodes.get(actor.spawn_node);
            const b = nodes.get(actor.goal_node);
            if (!a || !b) continue;
            const [ax, ay] = camera.toScreen(a.x, a.y);
            const [bx, by] = camera.toScreen(b.x, b.y);
            ctx.beginPath();
            ctx.moveTo(ax, ay);
            ctx.lineTo(bx, by);
            ctx.stroke();
        }
        ctx.setLineDash([]);
    }

    for (const node of graph.nodes) {
        const [sx, sy] = camera.toScreen(node.x, node.y);
        let fill = node.kind === "pedestrian" ? COLORS.pedestrianNode : COLORS.roadNode;
        let radius = Math.max(2.5, camera.scale * 0.35);
        if (opts.regionOf && opts.roi) {
            const region = opts.regionOf.get(node.id);
            if (region && opts.roi.has(region)) fill = COLORS.roiMember;
            else if (region && opts.eligible?.has(region)) fill = COLORS.eligible;
            else if (region && region === opts.rejectedRegion) fill = COLORS.rejected;
            else fill = COLORS.dimmed;
        }
        if (opts.candidates?.has(node.id)) {
            fill = COLORS.candidate;
            radius *= 1.4;
        }
        if (node.id === opts.selectedGoal) {
            fill = COLORS.goal;
            radius *= 1.4;
        }
        if (node.id === opts.selectedSpawn) {
            fill = COLORS.spawnSelected;
            radius *= 1.5;
        }
        ctx.beginPath();
        ctx.arc(sx, sy, radius, 0, 2 * Math.PI);
        ctx.fillStyle = fill;
        ctx.fill();
        if (opts.eligibleSpawns?.has(node.id)) {
            ctx.beginPath();
            ctx.arc(sx, sy, radius + 2, 0, 2 * Math.PI);
            ctx.strokeStyle = COLORS.roadNode;
            ctx.lineWidth = 1;
            ctx.stroke();
        }
        // heading tick
        const [tx, ty] = camera.toScreen(
            node.x + Math.cos(node.heading) * 1.2,
            node.y + Math.sin(node.heading) * 1.2,
        );
        ctx.beginPath();
        ctx.moveTo(sx, sy);
        ctx.lineTo(tx, ty);
        ctx.strokeStyle = "#55606a";
        ctx.lineWidth = 1;
        ctx.stroke();
    }

    if (opts.actors) {
        const modelSize = new Map((opts.models ?? []).map((m) => [m.id, [m.length, m.width]]));
        for (const actor of opts.actors) {
            const pose = opts.frame?.states[actor.actor_id];
            const spawn = nodes.get(actor.spawn_node);
            const x = pose ? pose.x : spawn?.x;
            const y = pose ? pose.y : spawn?.y;
            const heading = pose ? pose.heading : spawn?.heading ?? 0;
            if (x === undefined || y === undefined) continue;
            drawActorGlyph(ctx, camera, actor, x, y, heading, modelSize);
        }
    }
}

function drawActorGlyph(
    ctx: CanvasRenderingContext2D,
    camera: Camera,
    actor: ActorInfo,
    x: number,
    y: number,
    heading: number,
    modelSize: Map<string, number[]>,
): void {
    const size = (actor.model ? modelSize.get(actor.model) : undefined)
        ?? CATEGORY_SIZES[actor.category] ?? [4.0, 1.8];
    const [length, width] = size;
    const [sx, sy] = camera.toScreen(x, y);
    ctx.save();
    ctx.translate(sx, sy);
    ctx.rotate(-heading); // screen y is flipped
    ctx.fillStyle = CATEGORY_COLORS[actor.category] ?? "#444";
    if (actor.category === "pedestrian") {
        ctx.beginPath();
        ctx.arc(0, 0, Math.max(3, (width / 2) * camera.scale), 0, 2 * Math.PI);
        ctx.fill();
    } else {
        const l = Math.max(6, length * camera.scale);
        const w = Math.max(3, width * camera.scale);
        ctx.fillRect(-l / 2, -w / 2, l, w);
        ctx.beginPath(); // nose triangle marks the heading
        ctx.moveTo(l / 2, 0);
        ctx.lineTo(l / 2 - Math.min(5, l / 3), -w / 2);
        ctx.lineTo(l / 2 - Math.min(5, l / 3), w / 2);
        ctx.closePath();
        ctx.fillStyle = "#ffffff";
        ctx.fill();
    }
    if (actor.is_ego) {
        ctx.beginPath();
        ctx.arc(0, 0, Math.max(8, (length / 2 + 0.8) * camera.scale), 0, 2 * Math.PI);
        ctx.strokeStyle = COLORS.ego;
        ctx.lineWidth = 2;
        ctx.stroke();
    }
    ctx.restore();
}

export function graphBounds(graph: GraphPayload): [number, number, number, number] {
    let minX = Infinity, minY = Infinity, maxX = -Infinity, maxY = -Infinity;
    for (const n of graph.nodes) {
        minX = Math.min(minX, n.x);
        minY = Math.min(minY, n.y);
        maxX = Math.max(maxX, n.x);
        maxY = Math.max(maxY, n.y);
    }
    if (!isFinite(minX)) return [0, 0, 1, 1];
    return [minX, minY, maxX, maxY];
}

export function buildRegionIndex(regions: { region_id: string; node_ids: string[] }[]): Map<string, string> {
    const out = new Map<string, string>();
    for (const region of regions) {
        for (const nid of region.node_ids) out.set(nid, region.region_id);
    }
    return out;
}
