/** Progress-event stream subscription over server-sent events. */

import type { ProgressEvent } from "./api.js";

export interface EventSourceLike {
  onmessage: ((event: { data: string }) => void) | null;
  onerror: ((event: unknown) => void) | null;
  close(): void;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

const defaultFactory: EventSourceFactory = (url) =>
  new EventSource(url) as unknown as EventSourceLike;

/**
 * Opens the event stream and feeds parsed events to the callback. The
 * service replays history and closes the stream once the project goes
 * idle, so the first error/close is treated as end-of-run rather than
 * a reason to reconnect. Returns a dispose function.
 */
export function watchEvents(
  url: string,
  onEvent: (event: ProgressEvent) => void,
  onClose: () => void,
  factory: EventSourceFactory = defaultFactory,
): () => void {
  const source = factory(url);
  let finished = false;
  const finish = () => {
    if (finished) return;
    finished = true;
    source.close();
    onClose();
  };
  source.onmessage = (event) => {
    try {
      onEvent(JSON.parse(event.data) as ProgressEvent);
    } catch {
      // ignore malformed frames; the view poll will catch us up
    }
  };
  source.onerror = () => finish();
  return finish;
}
