/**
 * Deck state machine: one card at a time, one in-flight submission at a
 * time. A committed gesture is sent to the server and the card advances
 * only once the server confirms; on network failure the submission is
 * retried until it goes through. In training mode the true label is
 * revealed after each committed label gesture and advancing is blocked
 * until the participant acknowledges it.
 */

import { ApiClient, ApiError } from './api.js';
import type {
  Direction,
  DeviceType,
  PatchInfo,
  Progress,
  Reveal,
  StudyInfo,
  SubmitResponse,
} from './types.js';

export interface DeckView {
  showCard(patch: PatchInfo): void;
  showDone(progress: Progress): void;
  showProgress(progress: Progress): void;
  showReveal(reveal: Reveal): void;
  hideReveal(): void;
  showPostponeCue(): void;
  showHint(message: string): void;
  snapBack(): void;
}

const RETRY_DELAY_MS = 1500;

type Sleeper = (ms: number) => Promise<void>;

const defaultSleep: Sleeper = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export function detectDeviceType(
  width: number = typeof window === 'undefined' ? 0 : window.innerWidth,
  hasTouch: boolean = typeof navigator !== 'undefined' && navigator.maxTouchPoints > 0,
): DeviceType {
  if (!hasTouch) return width > 0 ? 'desktop' : 'unknown';
  return width >= 900 ? 'tablet' : 'mobile';
}

export class DeckController {
  progress: Progress;
  patch: PatchInfo | null = null;
  reveal: Reveal | null = null;
  done = false;

  private inFlight = false;
  private presentedAt = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly study: StudyInfo,
    private readonly view: DeckView,
    private readonly deviceType: DeviceType = detectDeviceType(),
    private readonly now: () => number = () => performance.now(),
    private readonly sleep: Sleeper = defaultSleep,
  ) {
    this.progress = study.progress;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  /** Direction is mapped in this study's config? Unmapped swipes snap back. */
  isMapped(direction: Direction): boolean {
    const entry = this.study.mapping[direction];
    return entry !== undefined && entry.action !== 'unassigned';
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    const item = await this.api.nextItem(this.study.study_id);
    this.progress = item.progress;
    this.view.showProgress(item.progress);
    if (item.done) {
      this.done = true;
      this.patch = null;
      this.view.showDone(item.progress);
      return;
    }
    this.done = false;
    this.patch = item.patch!;
    this.presentedAt = this.now();
    this.view.showCard(this.patch);
  }

  /**
   * Handle a committed swipe. Returns true when a submission was sent,
   * false when the gesture was rejected locally (busy, reveal pending, or
   * unmapped direction).
   */
  async swipe(direction: Direction): Promise<boolean> {
    if (this.inFlight || this.reveal || this.done || !this.patch) {
      return false;
    }
    if (!this.isMapped(direction)) {
      this.view.showHint(`${direction} is not assigned in this study`);
      this.view.snapBack();
      return false;
    }
    const payload = {
      direction,
      client_duration_ms: Math.round(this.now() - this.presentedAt),
      device_type: this.deviceType,
    };
    await this.send(() => this.api.submit(this.study.study_id, payload));
    return true;
  }

  /** Explicit postpone control (button rather than a gesture). */
  async postpone(): Promise<boolean> {
    if (this.inFlight || this.reveal || this.done || !this.patch) {
      return false;
    }
    const payload = {
      postpone: true,
      client_duration_ms: Math.round(this.now() - this.presentedAt),
      device_type: this.deviceType,
    };
    await this.send(() => this.api.submit(this.study.study_id, payload));
    return true;
  }

  private async send(call: () => Promise<SubmitResponse>): Promise<void> {
    this.inFlight = true;
    try {
      const response = await this.retrying(call);
      this.progress = response.progress;
      this.view.showProgress(response.progress);
      if (response.reveal) {
        // training mode: block until acknowledged
        this.reveal = response.reveal;
        this.view.showReveal(response.reveal);
        return;
      }
      if (response.action === 'postpone') {
        this.view.showPostponeCue();
      }
      await this.advance();
    } finally {
      this.inFlight = false;
    }
  }

  /** Acknowledge a training reveal and move on. */
  async acknowledgeReveal(): Promise<void> {
    if (!this.reveal) return;
    this.reveal = null;
    this.view.hideReveal();
    await this.advance();
  }

  async undo(): Promise<void> {
    if (this.inFlight || this.reveal) return;
    this.inFlight = true;
    try {
      const response = await this.api.undo(this.study.study_id);
      this.progress = response.progress;
      this.view.showProgress(response.progress);
    } catch (error) {
      if (error instanceof ApiError) {
        this.view.showHint(error.message);
        return;
      }
      throw error;
    } finally {
      this.inFlight = false;
    }
    await this.advance();
  }

  /** Pull the authoritative progress from the server. */
  async reconcile(): Promise<Progress> {
    const doc = await this.api.progress(this.study.study_id);
    this.progress = doc.progress;
    this.view.showProgress(doc.progress);
    return doc.progress;
  }

  /**
   * Run the call until the network lets it through. Client errors (4xx)
   * are not retried: the server rejected the gesture, so surface it.
   */
  private async retrying(call: () => Promise<SubmitResponse>): Promise<SubmitResponse> {
    for (;;) {
      try {
        return await call();
      } catch (error) {
        if (error instanceof ApiError && error.status < 500) {
          throw error;
        }
        await this.sleep(RETRY_DELAY_MS);
      }
    }
  }
}
