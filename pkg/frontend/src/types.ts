// Message shapes on the gateway's WebSocket protocol (see docs/wire-protocol.md).

export interface SamplePayload {
  seq: number;
  timestamp: string;
  codes: number[];
  volts: number[];
  mask: boolean[];
}

export type StreamMessage =
  | { type: "sample"; sample: SamplePayload }
  | { type: "status"; status: string }
  | { type: "error"; error: string };

export interface ChannelStats {
  count: number;
  min: number | null;
  max: number | null;
  mean: number | null;
  last: number | null;
}

export interface SessionStats {
  accepted: number;
  channels: ChannelStats[];
  decoder: { frames_ok: number; frames_rejected: number; bytes_discarded: number };
  recording_rows: number | null;
  mask: boolean[];
}

export interface ControlReply {
  ok: boolean;
  error?: string;
  stats?: SessionStats;
  rows?: number;
  path?: string;
}

export type ControlRequest =
  | { cmd: "start" }
  | { cmd: "stop" }
  | { cmd: "set_mask"; mask: boolean[] }
  | { cmd: "set_rate"; rate_hz: number }
  | { cmd: "arm_recording"; path: string }
  | { cmd: "disarm_recording" }
  | { cmd: "get_stats" };

export const NUM_CHANNELS = 4;
export const FULL_SCALE_VOLTS = 5;
