import { ChannelRing } from "./ring.js";
import { NUM_CHANNELS, SamplePayload, SessionStats, StreamMessage } from "./types.js";

export const DEFAULT_RING_POINTS = 600; // 10 minutes at 1 Hz

export type ConnectionState = "connecting" | "live" | "reconnecting";

/**
 * Client-side view of the acquisition session.
 *
 * The view never decodes or rescales anything: volts shown are exactly the
 * volts carried in stream messages. Channel toggles are a display mask;
 * every sample is buffered for all four channels so re-enabling a channel
 * reveals its history. Toggle state changes only when the backend
 * acknowledges the corresponding set_mask.
 */
export class SessionView {
  readonly rings: ChannelRing[];
  toggles: boolean[];
  connection: ConnectionState = "connecting";
  lastSample: SamplePayload | null = null;
  lastStatus = "";
  recordingArmed = false;
  recordingPath = "";
  stats: SessionStats | null = null;

  constructor(points: number = DEFAULT_RING_POINTS) {
    this.rings = Array.from({ length: NUM_CHANNELS }, () => new ChannelRing(points));
    this.toggles = Array(NUM_CHANNELS).fill(true);
  }

  handleStreamMessage(msg: StreamMessage): void {
    if (msg.type === "sample") {
      this.applySample(msg.sample);
    } else if (msg.type === "status") {
      this.lastStatus = msg.status;
    } else {
      this.lastStatus = msg.error;
    }
  }

  applySample(sample: SamplePayload): void {
    // Buffer all channels regardless of the display mask.
    for (let i = 0; i < NUM_CHANNELS; i++) {
      this.rings[i].push(sample.volts[i]);
    }
    this.lastSample = sample;
  }

  /** Mask to request when the user flips channel i; does not mutate state. */
  maskAfterToggle(i: number): boolean[] {
    if (i < 0 || i >= NUM_CHANNELS) throw new Error(`no such channel: ${i}`);
    const mask = this.toggles.slice();
    mask[i] = !mask[i];
    return mask;
  }

  /** Apply a mask only once the backend has acknowledged it. */
  applyAckedMask(mask: boolean[]): void {
    this.toggles = mask.slice();
  }

  /** Channel indices whose traces should be drawn. */
  visibleChannels(): number[] {
    const out: number[] = [];
    this.toggles.forEach((on, i) => {
      if (on) out.push(i);
    });
    return out;
  }

  onDisconnect(): void {
    this.connection = "reconnecting";
  }

  onConnect(): void {
    this.connection = "live";
    this.lastStatus = "";
  }
}
