/** Fixed-capacity ring of the most recent values for one channel trace. */
export class ChannelRing {
  private buf: number[] = [];

  constructor(readonly capacity: number) {
    if (capacity <= 0) throw new Error("capacity must be positive");
  }

  push(value: number): void {
    this.buf.push(value);
    if (this.buf.length > this.capacity) {
      this.buf.splice(0, this.buf.length - this.capacity);
    }
  }

  get length(): number {
    return this.buf.length;
  }

  /** Oldest-to-newest snapshot. */
  values(): number[] {
    return this.buf.slice();
  }

  clear(): void {
    this.buf = [];
  }
}
