// @vitest-environment jsdom
//
// Scripted browser-style test: mounts the real App against the real
// service and drives the Fig. 4 / Fig. 5 flows through DOM controls,
// asserting that everything displayed equals intercepted server
// responses.

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { Store } from "../src/state.js";
import { App } from "../src/views.js";
import { TestServer, startServer, until } from "./server.js";

let server: TestServer;
let root: HTMLElement;
let store: Store;

beforeAll(async () => {
    server = await startServer();
}, 120_000);

afterAll(() => {
    server?.stop();
});

function mount(): void {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    store = new Store(new ApiClient(server.base));
    new App(store, root);
}

const q = <T extends HTMLElement>(testId: string): T => {
    const el = root.querySelector<T>(`[data-testid="${testId}"]`);
    if (!el) throw new Error(`missing element ${testId}`);
    return el;
};

const maybe = (testId: string) => root.querySelector(`[data-testid="${testId}"]`);

function setSelect(testId: string, value: string): void {
    const select = q<HTMLSelectElement>(testId);
    select.value = value;
    select.dispatchEvent(new Event("change", { bubbles: true }));
}

function setInput(testId: string, value: string): void {
    const input = q<HTMLInputElement>(testId);
    input.value = value;
    input.dispatchEvent(new Event("input", { bubbles: true }));
}

describe("workbench flows in the DOM", () => {
    it("renders the catalog with oracle counts", async () => {
        mount();
        void store.loadCatalog();
        await until(() => maybe("map-card-fixture_tjunction"), 10_000, "catalog cards");
        const card = q("map-card-fixture_tjunction");
        expect(card.textContent).toContain("junctions 1");
        expect(card.textContent).toContain("crosswalks 1");
        expect(card.textContent).toContain("traffic lights 1");
        expect(maybe("empty-catalog")).toBeNull();
    });

    it("completes the ROI flow with highlighting and visual rejection", async () => {
        mount();
        void store.loadCatalog();
        await until(() => maybe("map-card-fixture_tjunction"), 10_000, "catalog cards");
        q("map-card-fixture_tjunction").click();
        await until(() => maybe("region-junction:100"), 10_000, "region chips");

        // before any pick every region is a legal start
        expect(q("region-road:1:0").className).toContain("eligible");

        q("region-road:1:0").click();
        await until(() => maybe("eligible-list"), 10_000, "scenario created");
        expect(q("region-road:1:0").className).toContain("member");
        // mirror of the server's eligible set: only the junction neighbours
        expect(q("eligible-list").textContent).toContain("junction:100");
        expect(q("region-junction:100").className).toContain("eligible");
        expect(q("region-road:2:0").className).toContain("far");

        // ineligible click: shake + unchanged roi, eligible set refreshed
        q("region-road:2:0").click();
        await until(
            () => maybe("region-road:2:0")?.className.includes("rejected"),
            10_000, "rejected flash",
        );
        const mirror = await (
            await fetch(`${server.base}/scenarios/${store.state.scenario!.scenario_id}`)
        ).json();
        expect(mirror.roi).toEqual(["road:1:0"]);
        expect(store.state.scenario!.eligible_extensions).toEqual(
            mirror.eligible_extensions,
        );

        // grow through the junction, then everything is reachable
        q("region-junction:100").click();
        await until(
            () => maybe("region-junction:100")?.className.includes("member"),
            10_000, "junction joined",
        );
        q("region-road:2:0").click();
        await until(
            () => maybe("region-road:2:0")?.className.includes("member"),
            10_000, "east leg joined",
        );
        expect(store.state.scenario!.roi).toEqual([
            "road:1:0", "junction:100", "road:2:0",
        ]);
    });

    it("completes the actor flow and scrubs a 201-frame playback", async () => {
        mount();
        void store.loadCatalog();
        await until(() => maybe("map-card-fixture_straight"), 10_000, "catalog cards");
        q("map-card-fixture_straight").click();
        await until(() => maybe("region-road:1:0"), 10_000, "region chips");
        q("region-road:1:0").click();
        await until(() => maybe("to-actors"), 10_000, "scenario created");
        q("region-road:1:1").click();
        await until(
            () => maybe("region-road:1:1")?.className.includes("member"),
            10_000, "second slice joined",
        );
        q("to-actors").click();
        await until(() => maybe("spawn-select"), 10_000, "actor view");

        // picking a spawn highlights its goal candidates within one round trip
        setSelect("spawn-select", "fixture_straight:1:-1:0");
        await until(
            () => store.state.goalCandidates.length > 0, 10_000, "candidates",
        );
        const sid = store.state.scenario!.scenario_id;
        const intercepted = await (
            await fetch(
                `${server.base}/scenarios/${sid}/goal-candidates` +
                `?spawn=${encodeURIComponent("fixture_straight:1:-1:0")}`,
            )
        ).json();
        expect(store.state.goalCandidates).toEqual(intercepted.candidates);
        await until(() => maybe("candidate-count"), 5_000, "candidate hint");
        expect(q("candidate-count").textContent).toContain("2 reachable goal node(s)");

        // out-of-range offset -> inline validation message on the field
        setSelect("goal-select", "fixture_straight:1:-1:20");
        setInput("velocity-input", "10.0");
        setInput("offset-input", "5.0");
        q("place-actor").click();
        await until(() => maybe("error-lateral_offset"), 10_000, "inline offset error");
        expect(store.state.scenario!.actors).toHaveLength(0);

        // fix the offset and place; then a second vehicle on the other lane
        setInput("offset-input", "0.0");
        q("place-actor").click();
        await until(() => maybe("actor-a1"), 10_000, "first actor");
        setSelect("spawn-select", "fixture_straight:1:-2:0");
        await until(
            () => store.state.goalCandidates.includes("fixture_straight:1:-2:20"),
            10_000, "second candidates",
        );
        setSelect("goal-select", "fixture_straight:1:-2:20");
        setInput("velocity-input", "12.5");
        setInput("offset-input", "0.2");
        q("place-actor").click();
        await until(() => maybe("actor-a2"), 10_000, "second actor");

        // the ego badge moves between vehicles
        q("ego-a1").click();
        await until(
            () => maybe("ego-a1")?.className.includes("on"), 10_000, "ego on a1",
        );
        q("ego-a2").click();
        await until(
            () => maybe("ego-a2")?.className.includes("on"), 10_000, "ego moved to a2",
        );
        expect(maybe("ego-a1")?.className).not.toContain("on");
        const mirror = await (await fetch(`${server.base}/scenarios/${sid}`)).json();
        expect(mirror.ego).toBe("a2");

        // realize at dt 0.05: a1 runs 100 m at 10 m/s -> 201 frames
        setInput("dt-input", "0.05");
        q("realize").click();
        await until(() => maybe("scrubber"), 15_000, "playback view");
        const scrubber = q<HTMLInputElement>("scrubber");
        expect(scrubber.max).toBe("200");
        expect(q("frame-label").textContent).toContain("frame 1/201");

        scrubber.value = "200";
        scrubber.dispatchEvent(new Event("input", { bubbles: true }));
        expect(q("frame-label").textContent).toContain("frame 201/201");
        expect(q("frame-label").textContent).toContain("t=10.00s");
        expect(store.state.cursor!.index).toBe(200);

        // frame-exact scrub to an interior frame
        scrubber.value = "137";
        scrubber.dispatchEvent(new Event("input", { bubbles: true }));
        expect(store.state.cursor!.index).toBe(137);
        expect(q("frame-label").textContent).toContain("t=6.85s");

        // the loop returns to editing
        q("back-to-editing").click();
        await until(() => maybe("spawn-select"), 10_000, "back in actor view");
        expect(store.state.view).toBe("actor");
    });
});
