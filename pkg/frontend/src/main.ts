import { drawStripChart } from "./chart.js";
import { ControlClient } from "./control.js";
import { reconnectDelayMs } from "./backoff.js";
import { SessionView } from "./state.js";
import { NUM_CHANNELS, StreamMessage } from "./types.js";

const CHANNEL_COLORS = ["#2f7ed8", "#d4533b", "#3aa655", "#9b59b6"];

const view = new SessionView();
let control: ControlClient | null = null;
let needsRedraw = true;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function toast(message: string): void {
  const box = $("toasts");
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = message;
  box.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

function setBanner(text: string, cls: string): void {
  const banner = $("banner");
  banner.textContent = text;
  banner.className = `banner ${cls}`;
}

// ---- stream socket with exponential-backoff reconnect ---------------------

function wsBase(): string {
  const proto = location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${location.host}`;
}

function connectStream(attempt: number): void {
  const sock = new WebSocket(`${wsBase()}/stream`);
  sock.onopen = () => {
    view.onConnect();
    setBanner("live", "ok");
    attempt = 0;
  };
  sock.onmessage = (ev) => {
    const msg = JSON.parse(ev.data as string) as StreamMessage;
    view.handleStreamMessage(msg);
    if (msg.type !== "sample") toast(view.lastStatus);
    needsRedraw = true;
  };
  sock.onclose = () => {
    view.onDisconnect();
    const delay = reconnectDelayMs(attempt);
    setBanner(`disconnected - retrying in ${(delay / 1000).toFixed(1)}s`, "warn");
    setTimeout(() => connectStream(attempt + 1), delay);
  };
  sock.onerror = () => sock.close();
}

function connectControl(attempt: number): void {
  const sock = new WebSocket(`${wsBase()}/control`);
  const client = new ControlClient(sock);
  sock.onopen = () => {
    control = client;
    attempt = 0;
    refreshStats();
  };
  sock.onmessage = (ev) => client.onMessage(ev.data as string);
  sock.onclose = () => {
    if (control === client) control = null;
    client.abortAll("control connection lost");
    setTimeout(() => connectControl(attempt + 1), reconnectDelayMs(attempt));
  };
  sock.onerror = () => sock.close();
}

// ---- control actions (state changes only on acknowledged replies) ---------

async function toggleChannel(i: number): Promise<void> {
  if (!control) return toast("not connected");
  const mask = view.maskAfterToggle(i);
  const reply = await control.request({ cmd: "set_mask", mask });
  if (reply.ok) {
    view.applyAckedMask(mask);
    needsRedraw = true;
  } else {
    toast(reply.error ?? "set_mask rejected");
  }
  syncToggleBoxes();
}

async function toggleRecording(): Promise<void> {
  if (!control) return toast("not connected");
  if (!view.recordingArmed) {
    const path = ($("rec-path") as HTMLInputElement).value.trim();
    if (!path) return toast("enter a recording path");
    const reply = await control.request({ cmd: "arm_recording", path });
    if (reply.ok) {
      view.recordingArmed = true;
      view.recordingPath = path;
    } else {
      toast(reply.error ?? "arm_recording rejected");
    }
  } else {
    const reply = await control.request({ cmd: "disarm_recording" });
    if (reply.ok) {
      view.recordingArmed = false;
      toast(`recording closed: ${reply.rows} rows`);
    } else {
      toast(reply.error ?? "disarm_recording rejected");
    }
  }
  ($("rec-btn") as HTMLButtonElement).textContent = view.recordingArmed
    ? "stop recording"
    : "start recording";
  refreshStats();
}

async function applyRate(): Promise<void> {
  if (!control) return toast("not connected");
  const rate = Number(($("rate-input") as HTMLInputElement).value);
  const reply = await control.request({ cmd: "set_rate", rate_hz: rate });
  if (!reply.ok) toast(reply.error ?? "set_rate rejected");
}

async function refreshStats(): Promise<void> {
  if (!control) return;
  const reply = await control.request({ cmd: "get_stats" });
  if (reply.ok && reply.stats) {
    view.stats = reply.stats;
    const s = reply.stats;
    $("stat-accepted").textContent = String(s.accepted);
    $("stat-rejected").textContent = String(s.decoder.frames_rejected);
    $("stat-rows").textContent = s.recording_rows === null ? "-" : String(s.recording_rows);
  }
}

// ---- rendering (throttled to animation frames) -----------------------------

function syncToggleBoxes(): void {
  for (let i = 0; i < NUM_CHANNELS; i++) {
    ($(`toggle-${i}`) as HTMLInputElement).checked = view.toggles[i];
  }
}

function render(): void {
  requestAnimationFrame(render);
  if (!needsRedraw) return;
  needsRedraw = false;
  for (let i = 0; i < NUM_CHANNELS; i++) {
    const canvas = $(`chart-${i}`) as HTMLCanvasElement;
    const ctx = canvas.getContext("2d");
    if (!ctx) continue;
    const values = view.toggles[i] ? view.rings[i].values() : [];
    drawStripChart(ctx, values, {
      width: canvas.width,
      height: canvas.height,
      color: CHANNEL_COLORS[i],
      capacity: view.rings[i].capacity,
    });
    const readout = $(`readout-${i}`);
    if (view.lastSample) {
      const code = view.lastSample.codes[i];
      const volts = view.lastSample.volts[i];
      readout.textContent = `${code} / ${volts.toFixed(3)} V`;
    } else {
      readout.textContent = "- / -";
    }
  }
}

function init(): void {
  for (let i = 0; i < NUM_CHANNELS; i++) {
    $(`toggle-${i}`).addEventListener("change", () => void toggleChannel(i));
  }
  $("rec-btn").addEventListener("click", () => void toggleRecording());
  $("rate-btn").addEventListener("click", () => void applyRate());
  setBanner("connecting...", "warn");
  connectStream(0);
  connectControl(0);
  setInterval(() => void refreshStats(), 2000);
  requestAnimationFrame(render);
}

window.addEventListener("load", init);
