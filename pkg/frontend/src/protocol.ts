// Wire protocol types mirroring docs/protocol.json, plus a structural
// validator used both at runtime (outgoing messages) and by the contract
// tests. The console never invents message shapes of its own.

export interface WireEnvelope {
  topic: string;
  type: string;
  seq: number;
  stamp: number;
  publisher: string;
  payload: Record<string, unknown>;
}

export interface ServerFrame {
  op: "hello" | "message" | "schema" | "error";
  version?: string;
  topics?: string[];
  message?: WireEnvelope;
  schema?: ProtocolSpec;
  error?: string;
  detail?: unknown;
}

export interface TopicSpec {
  type: string;
  direction: "command" | "telemetry";
  payload: Record<string, string>;
}

export interface ProtocolSpec {
  version: string;
  topics: Record<string, TopicSpec>;
  enums: Record<string, string[]>;
  shapes: Record<string, Record<string, string>>;
}

export interface Pose {
  x: number;
  y: number;
  yaw: number;
}

export interface Twist {
  vx: number;
  vy: number;
  yaw_rate: number;
}

export interface Telemetry {
  stamp: number;
  pose: Pose;
  twist: Twist;
  commanded_twist: Twist;
  wheel_speeds: { fl: number; fr: number; rr: number; rl: number };
  device_linear: number;
  device_tilt: number;
  device_phase: string;
  lights_on: boolean;
  estop_latched: boolean;
}

export interface LidarScan {
  stamp: number;
  angle_start: number;
  angle_step: number;
  max_range: number;
  ranges: number[];
}

export interface TrackInfo {
  track_id: number;
  bbox: number[];
  hits: number;
  age: number;
  time_since_update: number;
  pose_class: string;
}

export interface TrackSetMsg {
  stamp: number;
  target_id: number | null;
  tracks: TrackInfo[];
}

export interface GridMsg {
  stamp: number;
  width: number;
  height: number;
  resolution: number;
  origin: Pose;
  cells: string; // base64
}

export interface EventMsg {
  name: string;
  stamp: number;
  data: Record<string, unknown>;
}

export interface VocalEventMsg {
  kind: string;
  text: string;
  stamp: number;
}

export interface PathMsg {
  stamp: number;
  points: number[][];
  total_cost: number;
}

function checkField(kind: string, value: unknown, spec: ProtocolSpec): string | null {
  const optional = kind.endsWith("?");
  const base = optional ? kind.slice(0, -1) : kind;
  if (value === null || value === undefined) {
    return optional ? null : `missing required value of type ${base}`;
  }
  if (base.endsWith("[][]")) {
    if (!Array.isArray(value)) return "expected an array of arrays";
    for (const row of value) {
      if (!Array.isArray(row)) return "expected an array of arrays";
    }
    return null;
  }
  if (base.endsWith("[]")) {
    if (!Array.isArray(value)) return `expected ${base}`;
    const inner = base.slice(0, -2);
    for (const item of value) {
      const err = checkField(inner, item, spec);
      if (err) return err;
    }
    return null;
  }
  switch (base) {
    case "number":
      return typeof value === "number" && Number.isFinite(value) ? null : "expected number";
    case "string":
    case "base64":
      return typeof value === "string" ? null : "expected string";
    case "boolean":
      return typeof value === "boolean" ? null : "expected boolean";
    case "object":
      return typeof value === "object" ? null : "expected object";
    default: {
      const shape = spec.shapes[base];
      if (!shape) return `unknown field kind ${base}`;
      if (typeof value !== "object" || value === null) return `expected ${base} object`;
      for (const [name, fieldKind] of Object.entries(shape)) {
        const err = checkField(fieldKind, (value as Record<string, unknown>)[name], spec);
        if (err) return `${name}: ${err}`;
      }
      return null;
    }
  }
}

/** Validate an outgoing command against the published gateway schema.
 *  Returns a list of problems; empty means schema-valid. */
export function validateCommand(
  spec: ProtocolSpec,
  topic: string,
  payload: Record<string, unknown>,
): string[] {
  const entry = spec.topics[topic];
  if (!entry) return [`unknown topic ${topic}`];
  const problems: string[] = [];
  if (entry.direction !== "command") {
    problems.push(`topic ${topic} is not writable`);
  }
  for (const [field, kind] of Object.entries(entry.payload)) {
    const err = checkField(kind, payload[field], spec);
    if (err) problems.push(`${field}: ${err}`);
  }
  for (const field of Object.keys(payload)) {
    if (!(field in entry.payload)) problems.push(`unexpected field ${field}`);
  }
  // enum values, when the schema pins them
  for (const [key, allowed] of Object.entries(spec.enums)) {
    const [typeName, field] = key.split(".");
    if (typeName === entry.type && field in payload && payload[field] != null) {
      if (!allowed.includes(String(payload[field]))) {
        problems.push(`${field}: ${payload[field]} not in ${allowed.join("/")}`);
      }
    }
  }
  return problems;
}
