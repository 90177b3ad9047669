/**
 * Swipe gesture recognition over pointer (touch + mouse) and keyboard input.
 *
 * A drag commits when it travels at least COMMIT_FRACTION of the card's
 * extent along the dominant axis, or when it is released at fling speed;
 * anything less snaps back and produces no gesture. Arrow keys commit
 * immediately in the pressed direction.
 */

import type { Direction, InputModality } from './types.js';

export const COMMIT_FRACTION = 0.35;
export const FLING_VELOCITY = 0.5; // px per ms

export interface GestureEvent {
  direction: Direction;
  displacement: number;    // px along the dominant axis
  velocity: number;        // px per ms over the whole drag
  inputModality: InputModality;
}

export interface DragOutcome {
  commits: boolean;
  gesture: GestureEvent | null;
}

export function dominantDirection(dx: number, dy: number): Direction {
  if (Math.abs(dx) >= Math.abs(dy)) {
    return dx >= 0 ? 'right' : 'left';
  }
  return dy >= 0 ? 'down' : 'up';
}

/**
 * Classify a finished drag. ``extent`` is the card's size along the
 * dominant axis (width for left/right, height for up/down).
 */
export function classifyDrag(
  dx: number,
  dy: number,
  elapsedMs: number,
  cardWidth: number,
  cardHeight: number,
  modality: InputModality,
): DragOutcome {
  const direction = dominantDirection(dx, dy);
  const displacement = Math.max(Math.abs(dx), Math.abs(dy));
  if (displacement === 0) {
    return { commits: false, gesture: null };
  }
  const extent = direction === 'left' || direction === 'right' ? cardWidth : cardHeight;
  const velocity = elapsedMs > 0 ? displacement / elapsedMs : displacement;
  const commits = displacement >= COMMIT_FRACTION * extent || velocity >= FLING_VELOCITY;
  return {
    commits,
    gesture: { direction, displacement, velocity, inputModality: modality },
  };
}

const KEY_DIRECTIONS: Record<string, Direction> = {
  ArrowLeft: 'left',
  ArrowRight: 'right',
  ArrowUp: 'up',
  ArrowDown: 'down',
};

export interface SwipeCallbacks {
  /** A committed gesture. */
  onCommit(gesture: GestureEvent): void;
  /** Live drag offset, for card-follows-finger rendering. */
  onDrag?(dx: number, dy: number): void;
  /** Drag released below threshold: snap the card back. */
  onSnapBack?(): void;
}

/**
 * Attaches pointer and keyboard listeners to a card element. Pointer events
 * unify touch and mouse; the modality is reported per gesture.
 */
export class SwipeTracker {
  private startX = 0;
  private startY = 0;
  private startTime = 0;
  private lastX = 0;
  private lastY = 0;
  private tracking = false;

  constructor(
    private readonly element: HTMLElement,
    private readonly callbacks: SwipeCallbacks,
    private readonly now: () => number = () => performance.now(),
  ) {
    element.addEventListener('pointerdown', this.onPointerDown);
    element.addEventListener('pointermove', this.onPointerMove);
    element.addEventListener('pointerup', this.onPointerUp);
    element.addEventListener('pointercancel', this.onPointerCancel);
    element.addEventListener('keydown', this.onKeyDown);
  }

  destroy(): void {
    this.element.removeEventListener('pointerdown', this.onPointerDown);
    this.element.removeEventListener('pointermove', this.onPointerMove);
    this.element.removeEventListener('pointerup', this.onPointerUp);
    this.element.removeEventListener('pointercancel', this.onPointerCancel);
    this.element.removeEventListener('keydown', this.onKeyDown);
  }

  private onPointerDown = (event: PointerEvent): void => {
    this.tracking = true;
    this.startX = this.lastX = event.clientX;
    this.startY = this.lastY = event.clientY;
    this.startTime = this.now();
    if (this.element.setPointerCapture && event.pointerId !== undefined) {
      try {
        this.element.setPointerCapture(event.pointerId);
      } catch {
        /* jsdom and detached elements */
      }
    }
  };

  private onPointerMove = (event: PointerEvent): void => {
    if (!this.tracking) return;
    this.lastX = event.clientX;
    this.lastY = event.clientY;
    this.callbacks.onDrag?.(this.lastX - this.startX, this.lastY - this.startY);
  };

  private onPointerUp = (event: PointerEvent): void => {
    if (!this.tracking) return;
    this.tracking = false;
    const dx = event.clientX - this.startX;
    const dy = event.clientY - this.startY;
    const elapsed = this.now() - this.startTime;
    const modality: InputModality = event.pointerType === 'mouse' ? 'mouse' : 'touch';
    const rect = this.element.getBoundingClientRect();
    const outcome = classifyDrag(
      dx, dy, elapsed, rect.width || 1, rect.height || 1, modality);
    if (outcome.commits && outcome.gesture) {
      this.callbacks.onCommit(outcome.gesture);
    } else {
      this.callbacks.onSnapBack?.();
    }
  };

  private onPointerCancel = (): void => {
    this.tracking = false;
    this.callbacks.onSnapBack?.();
  };

  private onKeyDown = (event: KeyboardEvent): void => {
    const direction = KEY_DIRECTIONS[event.key];
    if (!direction) return;
    event.preventDefault();
    const rect = this.element.getBoundingClientRect();
    const extent = direction === 'left' || direction === 'right'
      ? rect.width || 1 : rect.height || 1;
    this.callbacks.onCommit({
      direction,
      displacement: extent,
      velocity: 0,
      inputModality: 'keyboard',
    });
  };
}
