// Parsing and cursor math for the line-delimited timeline documents
// produced by POST /scenarios/{id}/realize.

export interface FrameState {
    x: number;
    y: number;
    heading: number;
    done: boolean;
}

export interface TimelineFrame {
    t: number;
    states: Record<string, FrameState>;
}

export interface TimelineDoc {
    dt: number;
    duration: number;
    frameCount: number;
    actors: string[];
    frames: TimelineFrame[];
}

export function parseTimeline(text: string): TimelineDoc {
    const lines = text.split("\n").filter((line) => line.trim().length > 0);
    if (lines.length === 0) throw new Error("empty timeline document");
    const header = JSON.parse(lines[0]);
    if (header.format !== "timeline/1") {
        throw new Error(`unsupported timeline format: ${header.format}`);
    }
    const frames: TimelineFrame[] = lines.slice(1).map((line) => {
        const raw = JSON.parse(line);
        const states: Record<string, FrameState> = {};
        for (const [actorId, v] of Object.entries(raw.states as Record<string, number[]>)) {
            states[actorId] = { x: v[0], y: v[1], heading: v[2], done: Boolean(v[3]) };
        }
        return { t: raw.t, states };
    });
    if (frames.length !== header.frame_count) {
        throw new Error(`frame_count ${header.frame_count} but ${frames.length} frame lines`);
    }
    return {
        dt: header.dt,
        duration: header.duration,
        frameCount: header.frame_count,
        actors: header.actors,
        frames,
    };
}

/** Frame-exact playback position over a fixed-dt frame list. */
export class PlaybackCursor {
    index = 0;
    playing = false;
    speed = 1.0;
    private fractional = 0;

    constructor(readonly frameCount: number, readonly dt: number) {}

    get atEnd(): boolean {
        return this.index >= this.frameCount - 1;
    }

    /** Advance by wall-clock seconds; snaps to whole frames. */
    tick(elapsedSeconds: number): void {
        if (!this.playing) return;
        this.fractional += (elapsedSeconds * this.speed) / this.dt;
        const whole = Math.floor(this.fractional);
        if (whole > 0) {
            this.fractional -= whole;
            this.scrubTo(this.index + whole);
            if (this.atEnd) this.playing = false;
        }
    }

    scrubTo(index: number): void {
        this.index = Math.min(Math.max(Math.round(index), 0), this.frameCount - 1);
    }

    timeAt(index: number): number {
        return index * this.dt;
    }

    play(): void {
        if (this.atEnd) this.scrubTo(0);
        this.fractional = 0;
        this.playing = true;
    }

    pause(): void {
        this.playing = false;
    }
}
