// DOM wiring for the four workbench views. Each interactive element
// also exists as a plain control (chips, selects) so every flow is
// drivable without canvas picking.

import { Camera, hitTest } from "./camera.js";
import { buildRegionIndex, graphBounds, renderScene } from "./render.js";
import { Store, ViewState } from "./state.js";
import { ActorForm } from "./types.js";

function h<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
    const el = document.createElement(tag);
    for (const [key, value] of Object.entries(attrs)) {
        if (key === "class") el.className = value;
        else el.setAttribute(key, value);
    }
    el.append(...children);
    return el;
}

export class App {
    private root: HTMLElement;
    private camera = new Camera(900, 600);
    private canvas: HTMLCanvasElement;
    private ctx: CanvasRenderingContext2D | null;
    private raf = 0;
    private lastTick = 0;
    private fittedFor = "";
    // actor-form values survive re-renders (state changes rebuild the DOM)
    private draft = {
        category: "normal_vehicle",
        model: "",
        velocity: "8.0",
        offset: "0.0",
        dt: "0.05",
    };

    constructor(private store: Store, root: HTMLElement) {
        this.root = root;
        this.canvas = h("canvas", {
            width: "900",
            height: "600",
            "data-testid": "scene-canvas",
        });
        this.ctx = this.canvas.getContext ? this.canvas.getContext("2d") : null;
        this.bindCanvas();
        store.subscribe(() => this.render());
        this.render();
    }

    private bindCanvas(): void {
        let dragging = false;
        let lastX = 0;
        let lastY = 0;
        let moved = false;
        this.canvas.addEventListener("pointerdown", (ev) => {
            dragging = true;
            moved = false;
            lastX = ev.offsetX;
            lastY = ev.offsetY;
        });
        this.canvas.addEventListener("pointermove", (ev) => {
            if (!dragging) return;
            const dx = ev.offsetX - lastX;
            const dy = ev.offsetY - lastY;
            if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
            this.camera.panByScreen(dx, dy);
            lastX = ev.offsetX;
            lastY = ev.offsetY;
            this.drawScene();
        });
        this.canvas.addEventListener("pointerup", (ev) => {
            dragging = false;
            if (!moved) this.handleClick(ev.offsetX, ev.offsetY);
        });
        this.canvas.addEventListener("wheel", (ev) => {
            ev.preventDefault();
            this.camera.zoomAt(ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.15 : 1 / 1.15);
            this.drawScene();
        });
    }

    private handleClick(sx: number, sy: number): void {
        const s = this.store.state;
        const graph = s.view === "roi" ? s.mapGraph : s.subgraph;
        if (!graph) return;
        const nodeId = hitTest(graph.nodes, this.camera, sx, sy, 12);
        if (!nodeId) return;
        if (s.view === "roi" && s.regions) {
            const region = buildRegionIndex(s.regions.regions).get(nodeId);
            if (region) void this.store.clickRegion(region);
        } else if (s.view === "actor") {
            if (s.goalCandidates.includes(nodeId)) this.store.selectGoal(nodeId);
            else void this.store.selectSpawn(nodeId);
        }
    }

    // ------------------------------------------------------------------

    private render(): void {
        const s = this.store.state;
        this.root.replaceChildren(this.header(s), this.body(s));
        this.maybeFit(s);
        this.drawScene();
        this.managePlaybackLoop(s);
    }

    private header(s: ViewState): HTMLElement {
        const tab = (view: ViewState["view"], label: string, enabled: boolean) => {
            const button = h(
                "button",
                {
                    class: `tab ${s.view === view ? "active" : ""}`,
                    "data-testid": `tab-${view}`,
                    ...(enabled ? {} : { disabled: "true" }),
                },
                label,
            );
            button.addEventListener("click", () => {
                if (view === "catalog") this.store.goToCatalog();
                else if (view === "roi") this.store.goToRoiView();
                else if (view === "actor") this.store.goToActorView();
            });
            return button;
        };
        const undo = h("button", { class: "ghost", "data-testid": "undo" }, "undo");
        undo.addEventListener("click", () => void this.store.undo());
        return h(
            "header",
            {},
            h("span", { class: "brand" }, "scengen"),
            tab("catalog", "1 · Maps", true),
            tab("roi", "2 · Region", s.selectedMap !== null),
            tab("actor", "3 · Actors", s.scenario !== null),
            tab("playback", "4 · Playback", s.timeline !== null),
            h("span", { class: "spacer" }),
            s.scenario
                ? h("span", { class: "scenario-id", "data-testid": "scenario-id" },
                    s.scenario.scenario_id)
                : "",
            s.scenario && s.scenario.undo_depth > 0 ? undo : "",
        );
    }

    private body(s: ViewState): HTMLElement {
        if (s.view === "catalog") return this.catalogView(s);
        const panel =
            s.view === "roi" ? this.roiPanel(s)
            : s.view === "actor" ? this.actorPanel(s)
            : this.playbackPanel(s);
        return h("main", {}, panel, h("section", { class: "stage" }, this.canvas));
    }

    // -- catalog (Fig. 2)

    private catalogView(s: ViewState): HTMLElement {
        const container = h("main", { class: "catalog" });
        if (s.banner) {
            const retry = h("button", { "data-testid": "retry" }, "retry");
            retry.addEventListener("click", () => void this.store.loadCatalog());
            container.append(
                h("div", { class: "banner", "data-testid": "banner" },
                    `service unreachable — ${s.banner} `, retry),
            );
        }
        if (s.maps === null) {
            container.append(h("p", {}, "loading map catalog…"));
            return container;
        }
        if (s.maps.length === 0) {
            container.append(
                h("p", { class: "empty", "data-testid": "empty-catalog" },
                    "No maps ingested yet. Run: scengen ingest <map.xodr>"),
            );
            return container;
        }
        const grid = h("div", { class: "cards" });
        for (const map of s.maps) {
            const card = h(
                "article",
                { class: "card", "data-testid": `map-card-${map.map_id}` },
                h("h3", {}, map.map_id),
                h("p", {},
                    `junctions ${map.junction_count} · crosswalks ${map.crosswalk_count}` +
                    ` · traffic lights ${map.traffic_light_count}`),
                h("p", {}, `drivable ${(map.total_drivable_length / 1000).toFixed(2)} km`),
                map.speed_limit_range
                    ? h("p", {}, `speed ${map.speed_limit_range[0].toFixed(1)}–` +
                        `${map.speed_limit_range[1].toFixed(1)} m/s`)
                    : "",
            );
            card.addEventListener("click", () => void this.store.openMap(map.map_id));
            grid.append(card);
        }
        container.append(grid);
        return container;
    }

    // -- roi selection (Fig. 4)

    private roiPanel(s: ViewState): HTMLElement {
        const panel = h("aside", { class: "panel" },
            h("h2", {}, `Region of interest — ${s.selectedMap ?? ""}`),
            h("p", { class: "hint" },
                s.scenario
                    ? "Click highlighted neighbours to grow the ROI."
                    : "Click any region to start the scenario ROI."));
        const roi = new Set(s.scenario?.roi ?? []);
        const eligible = new Set(s.scenario?.eligible_extensions ?? []);
        const chips = h("div", { class: "chips", "data-testid": "region-chips" });
        for (const region of s.regions?.regions ?? []) {
            const id = region.region_id;
            const classes = ["chip"];
            if (roi.has(id)) classes.push("member");
            else if (!s.scenario || eligible.has(id)) classes.push("eligible");
            else classes.push("far");
            if (s.rejectedRegion === id) classes.push("rejected");
            const chip = h("button",
                { class: classes.join(" "), "data-testid": `region-${id}` }, id);
            chip.addEventListener("click", () => void this.store.clickRegion(id));
            chips.append(chip);
        }
        panel.append(chips);
        if (s.scenario) {
            const done = h("button", { class: "primary", "data-testid": "to-actors" },
                "Configure actors →");
            done.addEventListener("click", () => this.store.goToActorView());
            panel.append(
                h("p", {}, `roi: ${s.scenario.roi.join(", ")}`),
                h("p", { "data-testid": "eligible-list" },
                    `eligible: ${s.scenario.eligible_extensions.join(", ") || "—"}`),
                done,
            );
        }
        return panel;
    }

    // -- actor configuration (Fig. 5)

    private actorPanel(s: ViewState): HTMLElement {
        const panel = h("aside", { class: "panel" }, h("h2", {}, "Scenario composition"));
        if (!s.scenario) return panel;

        // environment (Fig. 5a)
        const presetSelect = h("select", { "data-testid": "preset-select" });
        for (const preset of s.assets?.weather_presets ?? []) {
            const opt = h("option", { value: preset.id }, preset.name);
            if (preset.id === s.scenario.environment.weather_preset) {
                opt.setAttribute("selected", "true");
            }
            presetSelect.append(opt);
        }
        const timeSelect = h("select", { "data-testid": "time-select" });
        for (const t of ["dawn", "noon", "sunset", "night"]) {
            const opt = h("option", { value: t }, t);
            if (t === s.scenario.environment.time_of_day) opt.setAttribute("selected", "true");
            timeSelect.append(opt);
        }
        presetSelect.addEventListener("change", () =>
            void this.store.setEnvironment(presetSelect.value, timeSelect.value));
        timeSelect.addEventListener("change", () =>
            void this.store.setEnvironment(presetSelect.value, timeSelect.value));
        panel.append(h("div", { class: "row" },
            h("label", {}, "weather ", presetSelect),
            h("label", {}, "time ", timeSelect)));

        // spawn & goal picking (Fig. 5b/5c)
        const spawnSelect = h("select", { "data-testid": "spawn-select" },
            h("option", { value: "" }, "— pick spawn node —"));
        for (const nid of s.scenario.eligible_spawn_nodes) {
            const opt = h("option", { value: nid }, nid);
            if (nid === s.selectedSpawn) opt.setAttribute("selected", "true");
            spawnSelect.append(opt);
        }
        spawnSelect.addEventListener("change", () =>
            void this.store.selectSpawn(spawnSelect.value || null));

        const goalSelect = h("select", { "data-testid": "goal-select" },
            h("option", { value: "" }, "— pick goal —"));
        for (const nid of s.goalCandidates) {
            const opt = h("option", { value: nid }, nid);
            if (nid === s.selectedGoal) opt.setAttribute("selected", "true");
            goalSelect.append(opt);
        }
        goalSelect.addEventListener("change", () => this.store.selectGoal(goalSelect.value));

        const categorySelect = h("select", { "data-testid": "category-select" });
        for (const cat of s.assets?.categories ?? []) {
            const opt = h("option", { value: cat }, cat);
            if (cat === this.draft.category) opt.setAttribute("selected", "true");
            categorySelect.append(opt);
        }
        const modelSelect = h("select", { "data-testid": "model-select" },
            h("option", { value: "" }, "any model"));
        const fillModels = () => {
            modelSelect.replaceChildren(h("option", { value: "" }, "any model"));
            for (const model of s.assets?.models ?? []) {
                if (model.category === categorySelect.value) {
                    const opt = h("option", { value: model.id }, model.name);
                    if (model.id === this.draft.model) opt.setAttribute("selected", "true");
                    modelSelect.append(opt);
                }
            }
        };
        categorySelect.addEventListener("change", () => {
            this.draft.category = categorySelect.value;
            this.draft.model = "";
            fillModels();
        });
        modelSelect.addEventListener("change", () => {
            this.draft.model = modelSelect.value;
        });
        fillModels();

        const velocity = h("input", {
            type: "number", value: this.draft.velocity, step: "0.5", min: "0.1",
            "data-testid": "velocity-input",
        });
        velocity.addEventListener("input", () => (this.draft.velocity = velocity.value));
        const offset = h("input", {
            type: "number", value: this.draft.offset, step: "0.1",
            "data-testid": "offset-input",
        });
        offset.addEventListener("input", () => (this.draft.offset = offset.value));

        const err = (field: string) =>
            s.fieldErrors[field]
                ? h("span", { class: "field-error", "data-testid": `error-${field}` },
                    s.fieldErrors[field])
                : "";

        const place = h("button", { class: "primary", "data-testid": "place-actor" },
            "Place actor");
        place.addEventListener("click", () => {
            const form: ActorForm = {
                category: categorySelect.value,
                model: modelSelect.value || null,
                spawn_node: spawnSelect.value,
                goal_node: goalSelect.value,
                desired_velocity: Number(velocity.value),
                lateral_offset: Number(offset.value),
            };
            void this.store.placeActor(form);
        });

        panel.append(
            h("div", { class: "form" },
                h("label", {}, "spawn ", spawnSelect), err("spawn_node"),
                h("label", {}, "goal ", goalSelect), err("goal_node"),
                h("p", { class: "hint", "data-testid": "candidate-count" },
                    s.selectedSpawn
                        ? `${s.goalCandidates.length} reachable goal node(s) highlighted`
                        : "select a spawn node to highlight its goals"),
                h("label", {}, "category ", categorySelect), err("category"),
                h("label", {}, "model ", modelSelect), err("model"),
                h("label", {}, "velocity m/s ", velocity), err("desired_velocity"),
                h("label", {}, "offset m ", offset), err("lateral_offset"),
                s.formError
                    ? h("p", { class: "field-error", "data-testid": "form-error" }, s.formError)
                    : "",
                place,
            ),
        );

        // placed actors with ego toggle
        const list = h("ul", { class: "actors", "data-testid": "actor-list" });
        for (const actor of s.scenario.actors) {
            const ego = h("button", {
                class: `ego ${actor.is_ego ? "on" : ""}`,
                "data-testid": `ego-${actor.actor_id}`,
                ...(actor.category === "pedestrian" ? { disabled: "true" } : {}),
            }, actor.is_ego ? "EGO" : "set ego");
            ego.addEventListener("click", () => void this.store.setEgo(actor.actor_id));
            const remove = h("button",
                { class: "ghost", "data-testid": `remove-${actor.actor_id}` }, "✕");
            remove.addEventListener("click", () => void this.store.removeActor(actor.actor_id));
            list.append(h("li", { "data-testid": `actor-${actor.actor_id}` },
                h("span", {}, `${actor.actor_id} · ${actor.category} · ` +
                    `${actor.desired_velocity.toFixed(1)} m/s`),
                ego, remove));
        }
        const dt = h("input", {
            type: "number", value: this.draft.dt, step: "0.01", min: "0.01",
            "data-testid": "dt-input",
        });
        dt.addEventListener("input", () => (this.draft.dt = dt.value));
        const realize = h("button", { class: "primary", "data-testid": "realize" },
            "Realize ▶");
        realize.addEventListener("click", () =>
            void this.store.startPlayback(Number(dt.value)));
        panel.append(
            h("p", {}, `actors ${s.scenario.actors.length} / capacity ` +
                `${s.scenario.max_allowable_actors + s.scenario.actors.length}`),
            list,
            h("div", { class: "row" }, h("label", {}, "dt ", dt), realize),
        );
        return panel;
    }

    // -- playback (bird's-eye preview)

    private playbackPanel(s: ViewState): HTMLElement {
        const panel = h("aside", { class: "panel" }, h("h2", {}, "Playback"));
        if (!s.timeline || !s.cursor) return panel;
        const cursor = s.cursor;
        const frames = s.timeline.frameCount;
        const scrub = h("input", {
            type: "range", min: "0", max: String(frames - 1), value: String(cursor.index),
            "data-testid": "scrubber",
        });
        const label = h("span", { "data-testid": "frame-label" },
            `frame ${cursor.index + 1}/${frames} · t=${cursor.timeAt(cursor.index).toFixed(2)}s`);
        scrub.addEventListener("input", () => {
            cursor.pause();
            cursor.scrubTo(Number(scrub.value));
            label.textContent =
                `frame ${cursor.index + 1}/${frames} · t=${cursor.timeAt(cursor.index).toFixed(2)}s`;
            this.drawScene();
        });
        const play = h("button", { class: "primary", "data-testid": "play" }, "play");
        play.addEventListener("click", () => {
            if (cursor.playing) cursor.pause();
            else cursor.play();
            play.textContent = cursor.playing ? "pause" : "play";
        });
        const back = h("button", { class: "ghost", "data-testid": "back-to-editing" },
            "← back to editing");
        back.addEventListener("click", () => this.store.returnToEditing());
        panel.append(
            h("p", {}, `duration ${s.timeline.duration.toFixed(2)} s · dt ${s.timeline.dt}` +
                ` · ${frames} frames`),
            h("div", { class: "row" }, play, scrub),
            label,
            back,
        );
        return panel;
    }

    // ------------------------------------------------------------------

    private maybeFit(s: ViewState): void {
        const graph = s.view === "roi" ? s.mapGraph : s.subgraph;
        const key = `${s.view === "roi" ? s.mapGraph?.map_id : s.scenario?.scenario_id}`;
        if (graph && key !== this.fittedFor) {
            this.camera.fitBounds(...graphBounds(graph));
            this.fittedFor = key;
        }
    }

    private drawScene(): void {
        if (!this.ctx) return;
        const s = this.store.state;
        const graph = s.view === "roi" ? s.mapGraph : s.subgraph;
        if (!graph) return;
        renderScene(this.ctx, this.camera, graph, {
            regionOf: s.view === "roi" && s.regions
                ? buildRegionIndex(s.regions.regions) : undefined,
            roi: new Set(s.scenario?.roi ?? []),
            eligible: s.scenario
                ? new Set(s.scenario.eligible_extensions)
                : new Set((s.regions?.regions ?? []).map((r) => r.region_id)),
            rejectedRegion: s.rejectedRegion,
            selectedSpawn: s.selectedSpawn,
            candidates: new Set(s.selectedSpawn ? s.goalCandidates : []),
            selectedGoal: s.selectedGoal,
            eligibleSpawns: s.view === "actor"
                ? new Set(s.scenario?.eligible_spawn_nodes ?? []) : undefined,
            actors: s.scenario?.actors,
            models: s.assets?.models,
            frame: s.view === "playback" && s.cursor && s.timeline
                ? s.timeline.frames[s.cursor.index] : null,
        });
    }

    private managePlaybackLoop(s: ViewState): void {
        cancelAnimationFrame(this.raf);
        if (s.view !== "playback" || !s.cursor) return;
        const step = (now: number) => {
            const cursor = this.store.state.cursor;
            if (!cursor) return;
            if (this.lastTick > 0 && cursor.playing) {
                cursor.tick((now - this.lastTick) / 1000);
                const scrub = this.root.querySelector<HTMLInputElement>(
                    '[data-testid="scrubber"]');
                const label = this.root.querySelector('[data-testid="frame-label"]');
                if (scrub) scrub.value = String(cursor.index);
                if (label) {
                    label.textContent = `frame ${cursor.index + 1}/${cursor.frameCount}` +
                        ` · t=${cursor.timeAt(cursor.index).toFixed(2)}s`;
                }
                this.drawScene();
            }
            this.lastTick = now;
            this.raf = requestAnimationFrame(step);
        };
        this.lastTick = 0;
        this.raf = requestAnimationFrame(step);
    }
}
