// Rendering throughput over the replayed follow-scenario log: the store
// plus renderer must sustain at least 10 Hz frames while consuming the
// full recorded message stream.

import { execFileSync } from "node:child_process";
import { existsSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { MapRenderer, type Ctx2D } from "../src/render.js";
import { ViewStore } from "../src/store.js";
import type { WireEnvelope } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const root = join(here, "..", "..");
const logPath = join(tmpdir(), "marvin-follow-replay.log");

function ensureLog(): void {
  if (existsSync(logPath)) return;
  execFileSync("python3", [
    "-m", "marvin.gateway.cli", "run",
    "--scenario", join(root, "scenarios", "follow_corridor.scn"),
    "--seed", "0", "--headless", "--record", logPath,
  ], { cwd: root, stdio: "ignore", timeout: 180_000 });
}

class StubCtx implements Ctx2D {
  canvas = { width: 760, height: 520 };
  fillStyle: Ctx2D["fillStyle"] = "";
  strokeStyle: Ctx2D["strokeStyle"] = "";
  lineWidth = 1;
  font = "";
  calls = 0;
  fillRect(): void { this.calls += 1; }
  beginPath(): void { this.calls += 1; }
  moveTo(): void { this.calls += 1; }
  lineTo(): void { this.calls += 1; }
  arc(): void { this.calls += 1; }
  stroke(): void { this.calls += 1; }
  fill(): void { this.calls += 1; }
  fillText(): void { this.calls += 1; }
  save(): void {}
  restore(): void {}
}

describe("render loop on the follow-scenario replay", () => {
  it("sustains at least 10 Hz while consuming the whole log", () => {
    ensureLog();
    const lines = readFileSync(logPath, "utf-8").trimEnd().split("\n");
    const header = JSON.parse(lines[0]);
    expect(header.format).toBe("MARVINLOG v1");

    const store = new ViewStore();
    const ctx = new StubCtx();
    const renderer = new MapRenderer(ctx);

    // render whenever 100 ms of log time elapsed, exactly like the live UI
    let frames = 0;
    let nextFrameAt = 0.0;
    let lastStamp = 0.0;
    const started = performance.now();
    for (const line of lines.slice(1)) {
      const record = JSON.parse(line) as WireEnvelope;
      store.apply(record);
      lastStamp = record.stamp;
      if (record.stamp >= nextFrameAt) {
        renderer.draw(store);
        frames += 1;
        nextFrameAt = record.stamp + 0.1;
      }
    }
    const wallSeconds = (performance.now() - started) / 1000;

    expect(lastStamp).toBeGreaterThan(40); // the whole 45 s run came through
    expect(frames).toBeGreaterThan(400);
    expect(ctx.calls).toBeGreaterThan(10_000);
    // 10 Hz over the log's own duration means processing must not lag it
    const achievedHz = frames / Math.max(wallSeconds, 1e-6);
    expect(achievedHz).toBeGreaterThanOrEqual(10);
  }, 240_000);
});
