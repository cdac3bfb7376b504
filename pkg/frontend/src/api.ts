import {
    ActorForm,
    ApiError,
    AssetsPayload,
    GraphPayload,
    MapSummary,
    RegionsPayload,
    ScenarioState,
} from "./types.js";

async function parseError(resp: Response): Promise<ApiError> {
    let code = "http_error";
    let message = `${resp.status} ${resp.statusText}`;
    let failures: string[] = [];
    let eligible: string[] = [];
    try {
        const body = await resp.json();
        code = body.code ?? code;
        message = body.message ?? message;
        failures = body.failures ?? [];
        eligible = body.eligible ?? [];
    } catch {
        // non-JSON error body: keep the HTTP status text
    }
    return new ApiError(resp.status, code, message, failures, eligible);
}

export class ApiClient {
    constructor(readonly base: string) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const resp = await fetch(this.base + path, init);
        if (!resp.ok) throw await parseError(resp);
        return (await resp.json()) as T;
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.request<T>(path, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(body),
        });
    }

    getMaps(): Promise<{ maps: MapSummary[] }> {
        return this.request("/maps");
    }

    getAssets(): Promise<AssetsPayload> {
        return this.request("/assets");
    }

    getRegions(mapId: string): Promise<RegionsPayload> {
        return this.request(`/maps/${encodeURIComponent(mapId)}/regions`);
    }

    getMapGraph(mapId: string): Promise<GraphPayload> {
        return this.request(`/maps/${encodeURIComponent(mapId)}/graph`);
    }

    getScenarioGraph(scenarioId: string): Promise<GraphPayload> {
        return this.request(`/scenarios/${scenarioId}/graph`);
    }

    getScenario(scenarioId: string): Promise<ScenarioState> {
        return this.request(`/scenarios/${scenarioId}`);
    }

    createScenario(
        mapId: string,
        roi: string[],
        environment: { weather_preset: string; time_of_day: string | number },
    ): Promise<ScenarioState> {
        return this.post("/scenarios", { map_id: mapId, roi, environment });
    }

    expandRoi(scenarioId: string, regionId: string): Promise<ScenarioState> {
        return this.post(`/scenarios/${scenarioId}/roi/expand`, { region_id: regionId });
    }

    goalCandidates(scenarioId: string, spawn: string): Promise<{ spawn: string; candidates: string[] }> {
        return this.request(
            `/scenarios/${scenarioId}/goal-candidates?spawn=${encodeURIComponent(spawn)}`,
        );
    }

    placeActor(scenarioId: string, form: ActorForm): Promise<ScenarioState & { actor_id: string }> {
        return this.post(`/scenarios/${scenarioId}/actors`, form);
    }

    removeActor(scenarioId: string, actorId: string): Promise<ScenarioState> {
        return this.request(`/scenarios/${scenarioId}/actors/${encodeURIComponent(actorId)}`, {
            method: "DELETE",
        });
    }

    setEgo(scenarioId: string, actorId: string): Promise<ScenarioState> {
        return this.post(`/scenarios/${scenarioId}/ego`, { actor_id: actorId });
    }

    setEnvironment(
        scenarioId: string,
        environment: { weather_preset: string; time_of_day: string | number },
    ): Promise<ScenarioState> {
        return this.post(`/scenarios/${scenarioId}/environment`, environment);
    }

    undo(scenarioId: string): Promise<ScenarioState> {
        return this.post(`/scenarios/${scenarioId}/undo`, {});
    }

    async realize(scenarioId: string, dt: number): Promise<string> {
        const resp = await fetch(`${this.base}/scenarios/${scenarioId}/realize`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ dt }),
        });
        if (!resp.ok) throw await parseError(resp);
        return resp.text();
    }

    async exportScenario(scenarioId: string): Promise<string> {
        const resp = await fetch(`${this.base}/scenarios/${scenarioId}/export`);
        if (!resp.ok) throw await parseError(resp);
        return resp.text();
    }
}
