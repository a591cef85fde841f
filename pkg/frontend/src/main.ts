// Console entry point: connects to the gateway, renders the view, and
// wires every control to its single wire message.

import { GatewayClient } from "./client.js";
import { HelpDialog } from "./help.js";
import { VirtualJoystick } from "./joystick.js";
import {
  deviceRequest,
  estop,
  lightsRequest,
  stopAction,
  taskAction,
  utteranceScript,
  type Command,
} from "./messages.js";
import { MapRenderer } from "./render.js";
import { ViewStore } from "./store.js";
import type { EventMsg } from "./protocol.js";

const TOPICS = [
  "telemetry", "lidar", "tracks", "planned_path", "map_grid",
  "costmap_grid", "events", "vocal_events",
];

const POIS = ["kitchen", "bedroom", "bathroom", "dock"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function toast(text: string): void {
  const box = el<HTMLDivElement>("toasts");
  const item = document.createElement("div");
  item.className = "toast";
  item.textContent = text;
  box.appendChild(item);
  setTimeout(() => item.remove(), 4000);
}

const store = new ViewStore();
const canvas = el<HTMLCanvasElement>("map");
const renderer = new MapRenderer(canvas.getContext("2d")!);

const url = `ws://${location.host}/ws`;
const client = new GatewayClient(url, TOPICS);

function publish(cmd: Command): void {
  if (!client.publish(cmd)) toast(`publish failed: ${cmd.topic}`);
}

const joystick = new VirtualJoystick(publish);
const helpDialog = new HelpDialog(publish);

client.onStatus = (connected) => {
  el("banner").style.display = connected ? "none" : "block";
};
client.onError = (error, detail) => toast(`${error}: ${JSON.stringify(detail)}`);
client.onMessage = (env) => {
  store.apply(env);
  if (env.topic === "events") helpDialog.onEvent(env.payload as unknown as EventMsg);
};
client.connect();

// ---- command panel ---------------------------------------------------

const tasksBox = el<HTMLDivElement>("tasks");
for (const poi of POIS) {
  const button = document.createElement("button");
  button.textContent = `go: ${poi}`;
  button.onclick = () => publish(taskAction("NavigateTo", poi));
  tasksBox.appendChild(button);
}
for (const [label, cmd] of [
  ["follow me", taskAction("Follow")],
  ["night assist: bathroom", taskAction("NightAssist", "bathroom")],
  ["go away", taskAction("GoAway")],
  ["help request", taskAction("HelpRequest")],
  ["stop task", stopAction()],
] as Array<[string, Command]>) {
  const button = document.createElement("button");
  button.textContent = label;
  button.onclick = () => publish(cmd);
  tasksBox.appendChild(button);
}

el<HTMLButtonElement>("estop").onclick = () => publish(estop(true));
el<HTMLButtonElement>("estop-reset").onclick = () => publish(estop(false));
for (const target of ["Deploy", "Retract", "TiltForward", "TiltHome"] as const) {
  el<HTMLButtonElement>(`dev-${target.toLowerCase()}`).onclick = () =>
    publish(deviceRequest(target));
}
el<HTMLButtonElement>("lights-on").onclick = () => publish(lightsRequest(true));
el<HTMLButtonElement>("lights-off").onclick = () => publish(lightsRequest(false));

el<HTMLButtonElement>("say").onclick = () => {
  const box = el<HTMLInputElement>("utterance");
  if (!box.value.trim()) return;
  for (const frame of utteranceScript(box.value)) publish(frame);
  box.value = "";
};

// ---- joystick --------------------------------------------------------

const pad = el<HTMLDivElement>("joystick");
let dragging = false;
function padMove(event: PointerEvent): void {
  const rect = pad.getBoundingClientRect();
  const nx = -(event.clientY - rect.top - rect.height / 2) / (rect.height / 2);
  const ny = -(event.clientX - rect.left - rect.width / 2) / (rect.width / 2);
  joystick.engage(Math.max(-1, Math.min(1, nx)), Math.max(-1, Math.min(1, ny)));
}
pad.onpointerdown = (event) => {
  dragging = true;
  pad.setPointerCapture(event.pointerId);
  padMove(event);
};
pad.onpointermove = (event) => {
  if (dragging) padMove(event);
};
pad.onpointerup = pad.onpointercancel = () => {
  dragging = false;
  joystick.release();
};
el<HTMLInputElement>("spin").oninput = (event) => {
  const value = Number((event.target as HTMLInputElement).value);
  joystick.engage(joystick.state.vx, joystick.state.vy, value);
};

// ---- help dialog -----------------------------------------------------

el<HTMLButtonElement>("help-confirm").onclick = () => helpDialog.confirm();
el<HTMLButtonElement>("help-deny").onclick = () => helpDialog.deny();

// ---- render + status loop --------------------------------------------

function refresh(): void {
  renderer.draw(store);
  const t = store.telemetry;
  el("status").textContent = t
    ? `t=${t.stamp.toFixed(2)}s  pose=(${t.pose.x.toFixed(2)}, ${t.pose.y.toFixed(2)}, ` +
      `${t.pose.yaw.toFixed(2)})  v=(${t.twist.vx.toFixed(2)}, ${t.twist.vy.toFixed(2)}, ` +
      `${t.twist.yaw_rate.toFixed(2)})  device=${t.device_phase} ` +
      `${t.lights_on ? "lights " : ""}${t.estop_latched ? "E-STOP" : ""}`
    : "waiting for telemetry";

  const dialog = el<HTMLDivElement>("help-dialog");
  if (helpDialog.state === "open") {
    dialog.style.display = "block";
    el("help-countdown").textContent = String(helpDialog.countdown(store.lastStamp));
  } else {
    if (helpDialog.state === "resolved") {
      toast(`help ${helpDialog.resolution}`);
      helpDialog.acknowledge();
    }
    dialog.style.display = "none";
  }

  el("transcript").textContent = store.transcript
    .slice(-12)
    .map((line) => `[${line.stamp.toFixed(1)}] ${line.kind}: ${line.text}`)
    .join("\n");
  el("events").textContent = store.events
    .slice(-12)
    .map((e) => `[${e.stamp.toFixed(1)}] ${e.name}`)
    .join("\n");
  requestAnimationFrame(refresh);
}
requestAnimationFrame(refresh);
