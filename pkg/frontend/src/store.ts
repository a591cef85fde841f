// In-memory view state: the single place wire messages land, decoupling
// message handling from rendering. The console holds no task logic.

import type {
  EventMsg,
  GridMsg,
  LidarScan,
  PathMsg,
  Telemetry,
  TrackSetMsg,
  VocalEventMsg,
  WireEnvelope,
} from "./protocol.js";

export interface DecodedGrid {
  width: number;
  height: number;
  resolution: number;
  originX: number;
  originY: number;
  cells: Uint8Array;
  stamp: number;
}

export interface TranscriptLine {
  stamp: number;
  kind: string;
  text: string;
}

export interface HelpPrompt {
  issuedAt: number;
  deadline: number;
}

const TRANSCRIPT_LIMIT = 80;
const EVENT_LIMIT = 120;

function decodeBase64(data: string): Uint8Array {
  if (typeof atob === "function") {
    const raw = atob(data);
    const out = new Uint8Array(raw.length);
    for (let i = 0; i < raw.length; i += 1) out[i] = raw.charCodeAt(i);
    return out;
  }
  return new Uint8Array(Buffer.from(data, "base64"));
}

export class ViewStore {
  telemetry: Telemetry | null = null;
  lidar: LidarScan | null = null;
  tracks: TrackSetMsg | null = null;
  path: PathMsg | null = null;
  map: DecodedGrid | null = null;
  costmap: DecodedGrid | null = null;
  events: EventMsg[] = [];
  transcript: TranscriptLine[] = [];
  helpPrompt: HelpPrompt | null = null;
  lastStamp = 0;
  dirty = false;

  apply(env: WireEnvelope): void {
    this.lastStamp = Math.max(this.lastStamp, env.stamp);
    this.dirty = true;
    switch (env.topic) {
      case "telemetry":
        this.telemetry = env.payload as unknown as Telemetry;
        break;
      case "lidar":
        this.lidar = env.payload as unknown as LidarScan;
        break;
      case "tracks":
        this.tracks = env.payload as unknown as TrackSetMsg;
        break;
      case "planned_path":
        this.path = env.payload as unknown as PathMsg;
        break;
      case "map_grid":
        this.map = this.decodeGrid(env.payload as unknown as GridMsg);
        break;
      case "costmap_grid":
        this.costmap = this.decodeGrid(env.payload as unknown as GridMsg);
        break;
      case "vocal_events": {
        const msg = env.payload as unknown as VocalEventMsg;
        this.transcript.push({ stamp: msg.stamp, kind: msg.kind, text: msg.text });
        if (this.transcript.length > TRANSCRIPT_LIMIT) this.transcript.shift();
        break;
      }
      case "events":
        this.applyEvent(env.payload as unknown as EventMsg);
        break;
      default:
        this.dirty = false;
    }
  }

  private applyEvent(event: EventMsg): void {
    this.events.push(event);
    if (this.events.length > EVENT_LIMIT) this.events.shift();
    if (event.name === "HelpPromptIssued") {
      const deadline = Number(event.data["deadline"] ?? event.stamp + 10);
      this.helpPrompt = { issuedAt: event.stamp, deadline };
    } else if (
      event.name === "HelpDispatched" ||
      event.name === "HelpDenied" ||
      event.name === "TaskAborted"
    ) {
      this.helpPrompt = null;
    }
  }

  private decodeGrid(msg: GridMsg): DecodedGrid {
    return {
      width: msg.width,
      height: msg.height,
      resolution: msg.resolution,
      originX: msg.origin.x,
      originY: msg.origin.y,
      cells: decodeBase64(msg.cells),
      stamp: msg.stamp,
    };
  }

  /** Seconds of help countdown left at the given clock, or null. */
  helpCountdown(now: number): number | null {
    if (!this.helpPrompt) return null;
    return Math.max(0, this.helpPrompt.deadline - now);
  }
}
