/**
 * In-memory session holder. Deliberately never touches localStorage,
 * sessionStorage, IndexedDB or cookies: a page reload forgets the session
 * and the user logs in again.
 */

import type { SessionInfo } from "./api.js";

export interface UiSession {
  sessionId: string;
  walletAddress: string;
  expiresAt: number; // unix seconds
}

let current: UiSession | null = null;

export function openSession(info: SessionInfo): UiSession {
  current = {
    sessionId: info.session_id,
    walletAddress: info.wallet_address,
    expiresAt: info.expires_at,
  };
  return current;
}

export function activeSession(now: () => number = () => Date.now() / 1000): UiSession | null {
  if (current && now() >= current.expiresAt) current = null;
  return current;
}

export function closeSession(): void {
  current = null;
}

export function remainingSeconds(
  session: UiSession,
  now: () => number = () => Date.now() / 1000,
): number {
  return Math.max(0, Math.floor(session.expiresAt - now()));
}
