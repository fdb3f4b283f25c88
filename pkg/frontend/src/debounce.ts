// Latest-wins single-flight queue: at most one request in the air; while
// it flies, newer submissions overwrite the pending slot and only the
// most recent one is sent afterwards.

export class LatestWins<T, R> {
  private inFlight = false;
  private pending: T | null = null;

  constructor(
    private readonly send: (payload: T) => Promise<R>,
    private readonly onResult: (payload: T, result: R) => void,
    private readonly onError: (payload: T, error: unknown) => void,
  ) {}

  submit(payload: T): void {
    if (this.inFlight) {
      this.pending = payload;
      return;
    }
    void this.fly(payload);
  }

  busy(): boolean {
    return this.inFlight;
  }

  private async fly(payload: T): Promise<void> {
    this.inFlight = true;
    try {
      const result = await this.send(payload);
      if (this.pending === null) {
        this.onResult(payload, result);
      }
    } catch (error) {
      if (this.pending === null) {
        this.onError(payload, error);
      }
    } finally {
      this.inFlight = false;
      if (this.pending !== null) {
        const next = this.pending;
        this.pending = null;
        void this.fly(next);
      }
    }
  }
}
