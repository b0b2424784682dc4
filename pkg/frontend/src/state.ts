// Session state: where the user is, which link context is active, and
// unsaved edit buffers. Pure data plus small guards; no DOM in here.

export interface EditBuffer {
  cell: string;
  kind: string;
  original: string;
  text: string;
  /** Repository revision when the buffer was loaded. */
  revision: number | null;
}

export interface Session {
  path: string;
  context: string | null;
  pinnedPath: string | null;
  buffer: EditBuffer | null;
  /** Monotonic counter so stale page responses never overwrite newer ones. */
  pageSeq: number;
}

export function newSession(): Session {
  return { path: "/", context: null, pinnedPath: null, buffer: null, pageSeq: 0 };
}

export function bufferDirty(session: Session): boolean {
  return session.buffer !== null && session.buffer.text !== session.buffer.original;
}

/**
 * Actions that would lose an unsaved buffer must ask first. Context
 * switches never discard the buffer, so they bypass this guard entirely.
 */
export function confirmDiscard(session: Session, ask: (msg: string) => boolean): boolean {
  if (!bufferDirty(session)) return true;
  const cell = session.buffer!.cell;
  if (!ask(`Discard unsaved changes to ${cell}?`)) return false;
  session.buffer = null;
  return true;
}

export function nextPageSeq(session: Session): number {
  session.pageSeq += 1;
  return session.pageSeq;
}

export function isCurrentSeq(session: Session, seq: number): boolean {
  return session.pageSeq === seq;
}
