// Builders for every message the console can publish. Each UI control maps
// to exactly one of these; the contract test validates them all against
// the gateway schema.

export interface Command {
  topic: string;
  payload: Record<string, unknown>;
}

export function taskAction(kind: string, poi?: string): Command {
  return {
    topic: "actions",
    payload: { kind, source: "Manual", poi: poi ?? null },
  };
}

export function stopAction(): Command {
  return taskAction("Stop");
}

export function manualVelocity(vx: number, vy: number, yawRate: number): Command {
  return {
    topic: "cmd_vel_manual",
    payload: {
      twist: { vx, vy, yaw_rate: yawRate },
      source: "Manual",
      stamp: 0, // rewritten to the simulation clock at the gateway
    },
  };
}

export function estop(latch: boolean): Command {
  return { topic: "estop", payload: { latch } };
}

export function deviceRequest(target: "Deploy" | "Retract" | "TiltForward" | "TiltHome"): Command {
  return { topic: "device_request", payload: { target } };
}

export function lightsRequest(on: boolean): Command {
  return { topic: "lights_request", payload: { on } };
}

export function helpReply(confirm: boolean): Command {
  return { topic: "help_reply", payload: { confirm } };
}

export function utteranceFrame(token: string | null, energy: number): Command {
  return {
    topic: "utterance_frames",
    payload: { stamp: 0, energy, token },
  };
}

/** Expand a typed sentence into trigger-style token frames plus the
 *  silence tail that closes endpointing. */
export function utteranceScript(text: string): Command[] {
  const words = text.trim().split(/\s+/).filter((w) => w.length > 0);
  const frames = words.map((w) => utteranceFrame(w, 0.8));
  for (let i = 0; i < 12; i += 1) frames.push(utteranceFrame(null, 0.02));
  return frames;
}
