/**
 * Offline queue for rating submissions.
 *
 * Ratings are the system's training signal, so a submission that fails on a
 * network error is kept and retried in order.  Flushing stops at the first
 * network failure to preserve ordering, and only one flush runs at a time.
 * Server rejections (4xx) are dropped: retrying them would fail forever.
 */

import { ApiError } from "./api";
import type { RatingAck, RatingPayload } from "./types";

export interface QueueStorage {
  load(): RatingPayload[];
  save(items: RatingPayload[]): void;
}

/** In-memory storage; the browser app plugs in localStorage instead. */
export class MemoryStorage implements QueueStorage {
  private items: RatingPayload[] = [];
  load(): RatingPayload[] {
    return [...this.items];
  }
  save(items: RatingPayload[]): void {
    this.items = [...items];
  }
}

export function localStorageBackend(key = "questgen_rating_queue"): QueueStorage {
  return {
    load(): RatingPayload[] {
      try {
        return JSON.parse(window.localStorage.getItem(key) ?? "[]");
      } catch {
        return [];
      }
    },
    save(items: RatingPayload[]): void {
      try {
        window.localStorage.setItem(key, JSON.stringify(items));
      } catch {
        /* storage full or unavailable; queue survives in memory only */
      }
    },
  };
}

export interface FlushResult {
  sent: number;
  rejected: number;
  remaining: number;
}

export class OfflineQueue {
  private flushing = false;

  constructor(private storage: QueueStorage = new MemoryStorage()) {}

  get length(): number {
    return this.storage.load().length;
  }

  peek(): RatingPayload[] {
    return this.storage.load();
  }

  enqueue(payload: RatingPayload): void {
    const items = this.storage.load();
    items.push(payload);
    this.storage.save(items);
  }

  /**
   * Send queued ratings in order.  Stops at the first network failure; a
   * concurrent call while a flush is running is a no-op.
   */
  async flush(post: (payload: RatingPayload) => Promise<RatingAck>): Promise<FlushResult> {
    if (this.flushing) {
      return { sent: 0, rejected: 0, remaining: this.length };
    }
    this.flushing = true;
    let sent = 0;
    let rejected = 0;
    try {
      let items = this.storage.load();
      while (items.length > 0) {
        const head = items[0]!;
        try {
          await post(head);
          sent += 1;
        } catch (err) {
          if (err instanceof ApiError) {
            rejected += 1; // the server saw it and said no; do not retry
          } else {
            break; // network failure: keep everything from here on
          }
        }
        items = items.slice(1);
        this.storage.save(items);
      }
      return { sent, rejected, remaining: items.length };
    } finally {
      this.flushing = false;
    }
  }
}
