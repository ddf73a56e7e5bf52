// Server-sent-events subscription with an injectable EventSource factory
// so the stream can be driven by a fake in tests.

import type { ProgressEvent } from "./types.js";

export interface EventSourceLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface Subscription {
  close(): void;
}

export function subscribeEvents(
  url: string,
  onEvent: (ev: ProgressEvent) => void,
  onEnd: () => void = () => {},
  factory: EventSourceFactory = (u) => new EventSource(u) as EventSourceLike,
): Subscription {
  const source = factory(url);
  source.onmessage = (msg) => {
    try {
      onEvent(JSON.parse(msg.data) as ProgressEvent);
    } catch {
      // malformed frames are dropped; the checklist only trusts valid JSON
    }
  };
  source.onerror = () => {
    // the gateway closes the stream when the turn finishes; EventSource
    // surfaces that as an error, which we treat as end-of-stream
    source.close();
    onEnd();
  };
  return {
    close() {
      source.close();
    },
  };
}
