// Canvas renderer: map raster, footprint-accurate robot, lidar points,
// person tracks with ID + pose class, planned path. Pure draw calls over
// the view store; no state of its own beyond the camera fit.

import type { ViewStore } from "./store.js";

export interface Ctx2D {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
}

const FOOTPRINT_LENGTH = 0.6;
const FOOTPRINT_WIDTH = 0.4;

export class MapRenderer {
  private scale = 60; // px per metre
  private offsetX = 0;
  private offsetY = 0;

  constructor(private ctx: Ctx2D) {}

  private fit(store: ViewStore): void {
    const grid = store.map ?? store.costmap;
    const { width, height } = this.ctx.canvas;
    if (!grid) {
      this.scale = 60;
      this.offsetX = width / 2;
      this.offsetY = height / 2;
      return;
    }
    const worldW = grid.width * grid.resolution;
    const worldH = grid.height * grid.resolution;
    this.scale = Math.min(width / worldW, height / worldH) * 0.95;
    this.offsetX = (width - worldW * this.scale) / 2 - grid.originX * this.scale;
    this.offsetY = height - (height - worldH * this.scale) / 2 + grid.originY * this.scale;
  }

  private px(x: number): number {
    return this.offsetX + x * this.scale;
  }

  private py(y: number): number {
    return this.offsetY - y * this.scale; // world y up, canvas y down
  }

  draw(store: ViewStore): void {
    const ctx = this.ctx;
    this.fit(store);
    ctx.fillStyle = "#14181d";
    ctx.fillRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    if (store.map) this.drawGrid(store.map);
    if (store.path) this.drawPath(store.path.points);
    if (store.lidar && store.telemetry) this.drawLidar(store);
    if (store.telemetry) this.drawRobot(store);
    if (store.tracks && store.telemetry) this.drawTracks(store);
    store.dirty = false;
  }

  private drawGrid(grid: NonNullable<ViewStore["map"]>): void {
    const ctx = this.ctx;
    const cell = grid.resolution * this.scale;
    for (let r = 0; r < grid.height; r += 1) {
      for (let c = 0; c < grid.width; c += 1) {
        const v = grid.cells[r * grid.width + c];
        if (v === 255) continue; // unknown stays background
        ctx.fillStyle = v === 100 ? "#8a93a5" : "#232a33";
        ctx.fillRect(
          this.px(grid.originX + c * grid.resolution),
          this.py(grid.originY + (r + 1) * grid.resolution),
          cell + 0.5,
          cell + 0.5,
        );
      }
    }
  }

  private drawPath(points: number[][]): void {
    const ctx = this.ctx;
    if (points.length < 2) return;
    ctx.strokeStyle = "#3aa3ff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(this.px(points[0][0]), this.py(points[0][1]));
    for (const [x, y] of points.slice(1)) ctx.lineTo(this.px(x), this.py(y));
    ctx.stroke();
  }

  private drawLidar(store: ViewStore): void {
    const ctx = this.ctx;
    const scan = store.lidar!;
    const pose = store.telemetry!.pose;
    ctx.fillStyle = "#e0564a";
    for (let i = 0; i < scan.ranges.length; i += 2) {
      const r = scan.ranges[i];
      if (r >= scan.max_range - 1e-6) continue;
      const a = scan.angle_start + i * scan.angle_step;
      ctx.fillRect(this.px(pose.x + r * Math.cos(a)) - 1,
                   this.py(pose.y + r * Math.sin(a)) - 1, 2, 2);
    }
  }

  private drawRobot(store: ViewStore): void {
    const ctx = this.ctx;
    const t = store.telemetry!;
    const { x, y, yaw } = t.pose;
    const c = Math.cos(yaw);
    const s = Math.sin(yaw);
    const hl = FOOTPRINT_LENGTH / 2;
    const hw = FOOTPRINT_WIDTH / 2;
    const corners: Array<[number, number]> = [
      [hl, hw], [hl, -hw], [-hl, -hw], [-hl, hw],
    ];
    ctx.strokeStyle = t.estop_latched ? "#ff5050" : "#7ddb7d";
    ctx.lineWidth = 2;
    ctx.beginPath();
    corners.forEach(([fx, fy], i) => {
      const wx = x + c * fx - s * fy;
      const wy = y + s * fx + c * fy;
      if (i === 0) ctx.moveTo(this.px(wx), this.py(wy));
      else ctx.lineTo(this.px(wx), this.py(wy));
    });
    const [fx, fy] = corners[0];
    ctx.lineTo(this.px(x + c * fx - s * fy), this.py(y + s * fx + c * fy));
    // heading tick
    ctx.moveTo(this.px(x), this.py(y));
    ctx.lineTo(this.px(x + c * hl * 1.4), this.py(y + s * hl * 1.4));
    ctx.stroke();
    if (t.lights_on) {
      ctx.fillStyle = "#ffe37a";
      ctx.beginPath();
      ctx.arc(this.px(x), this.py(y), 4, 0, Math.PI * 2);
      ctx.fill();
    }
  }

  private drawTracks(store: ViewStore): void {
    const ctx = this.ctx;
    ctx.font = "12px monospace";
    for (const track of store.tracks!.tracks) {
      // tracks live in image space; show the ID/class roster top-left and
      // highlight a Laying class in red
      const row = store.tracks!.tracks.indexOf(track);
      const laying = track.pose_class === "Laying";
      const target = store.tracks!.target_id === track.track_id;
      ctx.fillStyle = laying ? "#ff5050" : target ? "#7ddb7d" : "#c9d2e0";
      ctx.fillText(
        `#${track.track_id} ${track.pose_class}${target ? " <- target" : ""}`,
        8,
        16 + row * 14,
      );
    }
  }
}
