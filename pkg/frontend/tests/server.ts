// Boots the real scengen HTTP service on a scratch cache with both
// fixture maps ingested. Integration suites talk to this server, so
// they exercise the same surface a browser session would.

import { ChildProcess, execFileSync, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

export interface TestServer {
    base: string;
    stop(): void;
}

// vitest runs with frontend/ as the working directory
const FIXTURES = resolve(process.cwd(), "../tests/fixtures");

export async function startServer(): Promise<TestServer> {
    const dir = mkdtempSync(join(tmpdir(), "scengen-ui-"));
    const cache = join(dir, "cache");
    execFileSync("python3", [
        "-m", "scengen.cli", "ingest",
        join(FIXTURES, "fixture_straight.xodr"),
        join(FIXTURES, "fixture_tjunction.xodr"),
        "--spacing", "5.0", "--target-length", "50.0",
        "--cache-root", cache,
    ]);
    const port = 8400 + Math.floor(Math.random() * 2000);
    const proc: ChildProcess = spawn(
        "python3",
        ["-m", "scengen.cli", "serve", "--port", String(port), "--cache-root", cache],
        { stdio: "ignore" },
    );
    const base = `http://127.0.0.1:${port}`;
    const stop = () => {
        proc.kill();
        rmSync(dir, { recursive: true, force: true });
    };
    for (let attempt = 0; attempt < 150; attempt++) {
        try {
            const resp = await fetch(`${base}/health`);
            if (resp.ok) return { base, stop };
        } catch {
            // not up yet
        }
        await new Promise((r) => setTimeout(r, 100));
    }
    stop();
    throw new Error("scengen service did not come up");
}

export async function until(
    check: () => boolean | undefined | null | object,
    timeoutMs = 5000,
    label = "condition",
): Promise<void> {
    const deadline = Date.now() + timeoutMs;
    while (Date.now() < deadline) {
        if (check()) return;
        await new Promise((r) => setTimeout(r, 25));
    }
    throw new Error(`timed out waiting for ${label}`);
}
