/**
 * First-visit onboarding: a skippable intro that explains the swipe
 * gestures and this study's direction-to-label mapping. Shown once per
 * participant (tracked in localStorage), and again on demand via the
 * "replay intro" setting.
 */

import type { Direction, DirectionMapping } from './types.js';

const STORAGE_PREFIX = 'swipelabel.onboarded.';

const THUMBS: Record<Direction, string> = {
  left: '\u{1F448}',   // pointing left
  right: '\u{1F449}',  // pointing right
  up: '\u{1F446}',     // pointing up
  down: '\u{1F447}',   // pointing down
};

export interface OnboardingStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class OnboardingFlow {
  constructor(
    private readonly userId: string,
    private readonly storage: OnboardingStorage =
      typeof localStorage === 'undefined' ? new MemoryStorage() : localStorage,
  ) {}

  private get key(): string {
    return STORAGE_PREFIX + this.userId;
  }

  /** True when the intro should be shown (first contact with any study). */
  shouldShow(serverFirstVisit: boolean): boolean {
    return serverFirstVisit && this.storage.getItem(this.key) === null;
  }

  markSeen(): void {
    this.storage.setItem(this.key, new Date().toISOString());
  }

  /** Settings action: show the intro once more on the next deck open. */
  reset(): void {
    this.storage.removeItem(this.key);
  }

  /** Intro line per mapped direction: thumb icon, gesture, what it does. */
  legend(mapping: DirectionMapping): string[] {
    const lines: string[] = [];
    for (const direction of ['left', 'right', 'up', 'down'] as Direction[]) {
      const entry = mapping[direction];
      if (!entry || entry.action === 'unassigned') continue;
      const what = entry.action === 'postpone'
        ? 'postpone (decide later)'
        : `label as "${entry.class_name}"`;
      lines.push(`${THUMBS[direction]} swipe ${direction}: ${what}`);
    }
    return lines;
  }
}

class MemoryStorage implements OnboardingStorage {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }

  removeItem(key: string): void {
    this.data.delete(key);
  }
}
