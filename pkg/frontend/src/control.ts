import { ControlReply, ControlRequest } from "./types.js";

/** Minimal surface of a WebSocket the control client needs. */
export interface MessageSocket {
  send(data: string): void;
}

/**
 * Request/reply correlation over the /control socket. The gateway answers
 * each request with exactly one reply, in order, so a FIFO of pending
 * resolvers is sufficient.
 */
export class ControlClient {
  private pending: Array<{
    resolve: (reply: ControlReply) => void;
    reject: (err: Error) => void;
  }> = [];

  constructor(private socket: MessageSocket) {}

  request(req: ControlRequest): Promise<ControlReply> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      try {
        this.socket.send(JSON.stringify(req));
      } catch (err) {
        this.pending.pop();
        reject(err instanceof Error ? err : new Error(String(err)));
      }
    });
  }

  /** Feed one incoming /control message. */
  onMessage(data: string): void {
    const waiter = this.pending.shift();
    if (!waiter) return; // unsolicited reply; drop
    try {
      waiter.resolve(JSON.parse(data) as ControlReply);
    } catch {
      waiter.reject(new Error("malformed control reply"));
    }
  }

  /** Fail all outstanding requests, e.g. on socket close. */
  abortAll(reason: string): void {
    for (const waiter of this.pending.splice(0)) {
      waiter.reject(new Error(reason));
    }
  }

  get pendingCount(): number {
    return this.pending.length;
  }
}
