// Application state. Every roi / eligible-region / candidate / actor
// set shown by the UI is copied verbatim from the latest server
// response; nothing is recomputed locally. Mutations run one at a
// time, and responses of superseded candidate lookups are discarded
// by sequence number.

import { ApiClient } from "./api.js";
import { PlaybackCursor, TimelineDoc, parseTimeline } from "./timeline.js";
import {
    ActorForm,
    ApiError,
    AssetsPayload,
    GraphPayload,
    MapSummary,
    RegionsPayload,
    ScenarioState,
} from "./types.js";

export type ViewName = "catalog" | "roi" | "actor" | "playback";

export interface ViewState {
    view: ViewName;
    banner: string | null;
    maps: MapSummary[] | null;
    assets: AssetsPayload | null;
    selectedMap: string | null;
    regions: RegionsPayload | null;
    mapGraph: GraphPayload | null;
    scenario: ScenarioState | null;
    subgraph: GraphPayload | null;
    rejectedRegion: string | null;
    selectedSpawn: string | null;
    goalCandidates: string[];
    selectedGoal: string | null;
    fieldErrors: Record<string, string>;
    formError: string | null;
    timeline: TimelineDoc | null;
    cursor: PlaybackCursor | null;
    busy: boolean;
}

function initialState(): ViewState {
    return {
        view: "catalog",
        banner: null,
        maps: null,
        assets: null,
        selectedMap: null,
        regions: null,
        mapGraph: null,
        scenario: null,
        subgraph: null,
        rejectedRegion: null,
        selectedSpawn: null,
        goalCandidates: [],
        selectedGoal: null,
        fieldErrors: {},
        formError: null,
        timeline: null,
        cursor: null,
        busy: false,
    };
}

const FIELD_HINTS: [RegExp, string][] = [
    [/velocity/i, "desired_velocity"],
    [/offset/i, "lateral_offset"],
    [/model/i, "model"],
    [/goal/i, "goal_node"],
    [/spawn|occupied/i, "spawn_node"],
    [/category|pedestrian/i, "category"],
];

export function mapFailuresToFields(failures: string[]): Record<string, string> {
    const out: Record<string, string> = {};
    for (const failure of failures) {
        const hit = FIELD_HINTS.find(([re]) => re.test(failure));
        const field = hit ? hit[1] : "_form";
        out[field] = out[field] ? `${out[field]}; ${failure}` : failure;
    }
    return out;
}

export class Store {
    state: ViewState = initialState();
    private listeners = new Set<(s: ViewState) => void>();
    private candidateSeq = 0;

    constructor(readonly api: ApiClient) {}

    subscribe(fn: (s: ViewState) => void): () => void {
        this.listeners.add(fn);
        return () => this.listeners.delete(fn);
    }

    private update(patch: Partial<ViewState>): void {
        this.state = { ...this.state, ...patch };
        for (const fn of this.listeners) fn(this.state);
    }

    // -- catalog view

    async loadCatalog(): Promise<void> {
        this.update({ banner: null });
        try {
            const [maps, assets] = await Promise.all([
                this.api.getMaps(),
                this.api.getAssets(),
            ]);
            this.update({ maps: maps.maps, assets });
        } catch (err) {
            this.update({ banner: describe(err), maps: this.state.maps ?? [] });
        }
    }

    async openMap(mapId: string): Promise<void> {
        try {
            const [regions, mapGraph] = await Promise.all([
                this.api.getRegions(mapId),
                this.api.getMapGraph(mapId),
            ]);
            this.update({
                selectedMap: mapId,
                regions,
                mapGraph,
                scenario: null,
                subgraph: null,
                selectedSpawn: null,
                goalCandidates: [],
                selectedGoal: null,
                timeline: null,
                cursor: null,
                view: "roi",
                banner: null,
            });
        } catch (err) {
            this.update({ banner: describe(err) });
        }
    }

    // -- roi view (Fig. 4 flow)

    /** First click creates the scenario, later clicks expand the roi. */
    async clickRegion(regionId: string): Promise<void> {
        if (this.state.busy || !this.state.selectedMap) return;
        this.update({ busy: true, rejectedRegion: null });
        try {
            let scenario: ScenarioState;
            if (this.state.scenario === null) {
                const preset = this.state.assets?.weather_presets[0]?.id ?? "ClearNoon";
                scenario = await this.api.createScenario(
                    this.state.selectedMap, [regionId],
                    { weather_preset: preset, time_of_day: "noon" },
                );
            } else {
                scenario = await this.api.expandRoi(this.state.scenario.scenario_id, regionId);
            }
            await this.applyScenario(scenario);
        } catch (err) {
            if (err instanceof ApiError && err.status === 409) {
                // re-sync eligible highlighting with the server, then flash
                // the rejected chip (cleared by the next successful action)
                await this.refreshScenario();
                this.update({ rejectedRegion: regionId });
            } else {
                this.update({ banner: describe(err) });
            }
        } finally {
            this.update({ busy: false });
        }
    }

    // -- actor view (Fig. 5 flow)

    async selectSpawn(nodeId: string | null): Promise<void> {
        if (nodeId === null) {
            this.candidateSeq++;
            this.update({ selectedSpawn: null, goalCandidates: [], selectedGoal: null });
            return;
        }
        if (!this.state.scenario) return;
        const seq = ++this.candidateSeq;
        this.update({ selectedSpawn: nodeId, goalCandidates: [], selectedGoal: null });
        try {
            const resp = await this.api.goalCandidates(this.state.scenario.scenario_id, nodeId);
            if (seq !== this.candidateSeq) return; // superseded lookup
            this.update({ goalCandidates: resp.candidates });
        } catch (err) {
            if (seq !== this.candidateSeq) return;
            this.update({ selectedSpawn: null, goalCandidates: [], banner: describe(err) });
        }
    }

    selectGoal(nodeId: string): void {
        if (this.state.goalCandidates.includes(nodeId)) {
            this.update({ selectedGoal: nodeId, fieldErrors: {}, formError: null });
        }
    }

    async placeActor(form: ActorForm): Promise<boolean> {
        if (this.state.busy || !this.state.scenario) return false;
        this.update({ busy: true, fieldErrors: {}, formError: null });
        try {
            const state = await this.api.placeActor(this.state.scenario.scenario_id, form);
            await this.applyScenario(state);
            this.update({ selectedSpawn: null, goalCandidates: [], selectedGoal: null });
            return true;
        } catch (err) {
            if (err instanceof ApiError && (err.status === 422 || err.status === 409)) {
                const fields = err.failures.length
                    ? mapFailuresToFields(err.failures)
                    : mapFailuresToFields([err.message]);
                this.update({ fieldErrors: fields, formError: fields._form ?? null });
            } else {
                this.update({ banner: describe(err) });
            }
            return false;
        } finally {
            this.update({ busy: false });
        }
    }

    async removeActor(actorId: string): Promise<void> {
        await this.mutateScenario((sid) => this.api.removeActor(sid, actorId));
    }

    async setEgo(actorId: string): Promise<void> {
        await this.mutateScenario((sid) => this.api.setEgo(sid, actorId));
    }

    async setEnvironment(preset: string, time: string | number): Promise<void> {
        await this.mutateScenario((sid) =>
            this.api.setEnvironment(sid, { weather_preset: preset, time_of_day: time }),
        );
    }

    async undo(): Promise<void> {
        await this.mutateScenario((sid) => this.api.undo(sid));
    }

    private async mutateScenario(
        fn: (scenarioId: string) => Promise<ScenarioState>,
    ): Promise<void> {
        if (this.state.busy || !this.state.scenario) return;
        this.update({ busy: true });
        try {
            await this.applyScenario(await fn(this.state.scenario.scenario_id));
        } catch (err) {
            if (err instanceof ApiError && (err.status === 422 || err.status === 409)) {
                this.update({ formError: err.message });
            } else {
                this.update({ banner: describe(err) });
            }
        } finally {
            this.update({ busy: false });
        }
    }

    // -- playback view

    async startPlayback(dt: number): Promise<void> {
        if (this.state.busy || !this.state.scenario) return;
        this.update({ busy: true, formError: null });
        try {
            const text = await this.api.realize(this.state.scenario.scenario_id, dt);
            const timeline = parseTimeline(text);
            this.update({
                timeline,
                cursor: new PlaybackCursor(timeline.frameCount, timeline.dt),
                view: "playback",
            });
        } catch (err) {
            this.update({ formError: describe(err) });
        } finally {
            this.update({ busy: false });
        }
    }

    /** The paper's loop: playback hands straight back to editing. */
    returnToEditing(): void {
        this.update({ view: "actor", timeline: null, cursor: null });
    }

    goToActorView(): void {
        if (this.state.scenario) this.update({ view: "actor" });
    }

    goToRoiView(): void {
        this.update({ view: "roi" });
    }

    goToCatalog(): void {
        this.update({ view: "catalog" });
    }

    // -- shared

    private async applyScenario(scenario: ScenarioState): Promise<void> {
        const subgraph = await this.api.getScenarioGraph(scenario.scenario_id);
        this.update({ scenario, subgraph, rejectedRegion: null });
    }

    async refreshScenario(): Promise<void> {
        if (!this.state.scenario) return;
        try {
            await this.applyScenario(
                await this.api.getScenario(this.state.scenario.scenario_id),
            );
        } catch (err) {
            this.update({ banner: describe(err) });
        }
    }
}

function describe(err: unknown): string {
    if (err instanceof ApiError) return `${err.code}: ${err.message}`;
    return err instanceof Error ? err.message : String(err);
}
