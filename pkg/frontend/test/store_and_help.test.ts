import { describe, expect, it, vi } from "vitest";

import { HelpDialog } from "../src/help.js";
import { VirtualJoystick } from "../src/joystick.js";
import type { Command } from "../src/messages.js";
import type { WireEnvelope } from "../src/protocol.js";
import { ViewStore } from "../src/store.js";

function envelope(topic: string, payload: Record<string, unknown>, stamp = 1.0): WireEnvelope {
  return { topic, type: "x", seq: 1, stamp, publisher: "test", payload };
}

const TELEMETRY = {
  stamp: 2.0,
  pose: { x: 1, y: 2, yaw: 0.3 },
  twist: { vx: 0.1, vy: 0, yaw_rate: 0 },
  commanded_twist: { vx: 0.2, vy: 0, yaw_rate: 0 },
  wheel_speeds: { fl: 1, fr: 1, rr: 1, rl: 1 },
  device_linear: 0,
  device_tilt: 0,
  device_phase: "Ready",
  lights_on: false,
  estop_latched: false,
};

describe("view store", () => {
  it("keeps the latest telemetry and marks itself dirty", () => {
    const store = new ViewStore();
    store.apply(envelope("telemetry", TELEMETRY, 2.0));
    expect(store.telemetry?.pose.x).toBe(1);
    expect(store.dirty).toBe(true);
    expect(store.lastStamp).toBe(2.0);
  });

  it("decodes base64 grids", () => {
    const store = new ViewStore();
    const cells = Buffer.from([0, 100, 255, 0]).toString("base64");
    store.apply(envelope("map_grid", {
      stamp: 1, width: 2, height: 2, resolution: 0.1,
      origin: { x: 0, y: 0, yaw: 0 }, cells,
    }));
    expect(Array.from(store.map!.cells)).toEqual([0, 100, 255, 0]);
  });

  it("tracks the help prompt lifecycle from events", () => {
    const store = new ViewStore();
    store.apply(envelope("events", { name: "HelpPromptIssued", stamp: 5.0, data: { deadline: 15.0 } }, 5.0));
    expect(store.helpCountdown(8.0)).toBeCloseTo(7.0);
    store.apply(envelope("events", { name: "HelpDispatched", stamp: 15.0, data: {} }, 15.0));
    expect(store.helpCountdown(15.0)).toBeNull();
  });

  it("keeps a bounded transcript", () => {
    const store = new ViewStore();
    for (let i = 0; i < 200; i += 1) {
      store.apply(envelope("vocal_events", { kind: "response", text: `t${i}`, stamp: i }));
    }
    expect(store.transcript.length).toBeLessThanOrEqual(80);
    expect(store.transcript.at(-1)?.text).toBe("t199");
  });
});

describe("help dialog", () => {
  function dialogWith(published: Command[]): HelpDialog {
    return new HelpDialog((cmd) => published.push(cmd));
  }

  it("opens on the prompt and counts down", () => {
    const dialog = dialogWith([]);
    dialog.onEvent({ name: "HelpPromptIssued", stamp: 3.0, data: { deadline: 13.0 } });
    expect(dialog.state).toBe("open");
    expect(dialog.countdown(4.5)).toBe(9);
  });

  it("confirm publishes exactly one affirmative reply", () => {
    const published: Command[] = [];
    const dialog = dialogWith(published);
    dialog.onEvent({ name: "HelpPromptIssued", stamp: 3.0, data: { deadline: 13.0 } });
    expect(dialog.confirm()).toBe(true);
    expect(dialog.confirm()).toBe(false); // a second click does nothing
    expect(published).toEqual([{ topic: "help_reply", payload: { confirm: true } }]);
  });

  it("deny publishes a negative reply and closes on HelpDenied", () => {
    const published: Command[] = [];
    const dialog = dialogWith(published);
    dialog.onEvent({ name: "HelpPromptIssued", stamp: 3.0, data: { deadline: 13.0 } });
    dialog.deny();
    dialog.onEvent({ name: "HelpDenied", stamp: 4.0, data: {} });
    expect(dialog.state).toBe("resolved");
    expect(dialog.resolution).toBe("denied");
    expect(published[0].payload).toEqual({ confirm: false });
  });

  it("closes by itself when the timeout dispatches", () => {
    const dialog = dialogWith([]);
    dialog.onEvent({ name: "HelpPromptIssued", stamp: 3.0, data: { deadline: 13.0 } });
    dialog.onEvent({ name: "HelpDispatched", stamp: 13.02, data: {} });
    expect(dialog.state).toBe("resolved");
    expect(dialog.resolution).toBe("dispatched");
    dialog.acknowledge();
    expect(dialog.state).toBe("closed");
  });
});

describe("virtual joystick", () => {
  it("publishes manual twists at 20 Hz while engaged, zero on release", () => {
    vi.useFakeTimers();
    const published: Command[] = [];
    const joystick = new VirtualJoystick((cmd) => published.push(cmd), 1.0, 1.5);
    joystick.engage(1.0, 0.0);
    vi.advanceTimersByTime(1000);
    joystick.release();
    vi.useRealTimers();

    // one initial + 20 periodic + final zero
    expect(published.length).toBe(22);
    const twist = published[5].payload["twist"] as { vx: number };
    expect(twist.vx).toBeCloseTo(1.0);
    const last = published.at(-1)!.payload["twist"] as { vx: number; vy: number };
    expect(last.vx).toBe(0);
    expect(published.every((c) => c.topic === "cmd_vel_manual")).toBe(true);
  });
});
