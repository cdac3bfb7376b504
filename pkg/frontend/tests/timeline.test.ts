import { describe, expect, it } from "vitest";

import { PlaybackCursor, parseTimeline } from "../src/timeline.js";

function doc(frames: number, dt = 0.05): string {
    const lines = [
        JSON.stringify({
            format: "timeline/1",
            dt,
            duration: (frames - 1) * dt,
            frame_count: frames,
            actors: ["a1"],
        }),
    ];
    for (let k = 0; k < frames; k++) {
        lines.push(
            JSON.stringify({
                t: k * dt,
                states: { a1: [k * 0.5, -1.75, 0.0, k === frames - 1] },
            }),
        );
    }
    return lines.join("\n") + "\n";
}

describe("parseTimeline", () => {
    it("parses header and frames", () => {
        const timeline = parseTimeline(doc(201));
        expect(timeline.frameCount).toBe(201);
        expect(timeline.frames).toHaveLength(201);
        expect(timeline.actors).toEqual(["a1"]);
        expect(timeline.frames[0].states.a1).toEqual({
            x: 0, y: -1.75, heading: 0, done: false,
        });
        expect(timeline.frames[200].states.a1.done).toBe(true);
    });

    it("rejects other formats and inconsistent counts", () => {
        expect(() => parseTimeline("{\"format\":\"timeline/9\"}")).toThrow(/format/);
        const broken = doc(3).split("\n").slice(0, 3).join("\n");
        expect(() => parseTimeline(broken)).toThrow(/frame_count/);
        expect(() => parseTimeline("")).toThrow(/empty/);
    });
});

describe("PlaybackCursor", () => {
    it("scrubs frame-exactly and clamps", () => {
        const cursor = new PlaybackCursor(201, 0.05);
        cursor.scrubTo(137);
        expect(cursor.index).toBe(137);
        expect(cursor.timeAt(cursor.index)).toBeCloseTo(6.85, 12);
        cursor.scrubTo(-5);
        expect(cursor.index).toBe(0);
        cursor.scrubTo(9999);
        expect(cursor.index).toBe(200);
        expect(cursor.atEnd).toBe(true);
    });

    it("advances by whole frames while playing and stops at the end", () => {
        const cursor = new PlaybackCursor(11, 0.1);
        cursor.play();
        cursor.tick(0.05); // half a frame: no movement yet
        expect(cursor.index).toBe(0);
        cursor.tick(0.05);
        expect(cursor.index).toBe(1);
        cursor.tick(0.35);
        expect(cursor.index).toBe(4);
        expect(cursor.timeAt(cursor.index)).toBeCloseTo(0.4, 12);
        cursor.tick(10);
        expect(cursor.index).toBe(10);
        expect(cursor.playing).toBe(false); // paused on arrival
    });

    it("does not move while paused and restarts from the top after the end", () => {
        const cursor = new PlaybackCursor(5, 0.1);
        cursor.tick(1);
        expect(cursor.index).toBe(0);
        cursor.scrubTo(4);
        cursor.play(); // play at the end rewinds
        expect(cursor.index).toBe(0);
        expect(cursor.playing).toBe(true);
    });
});
