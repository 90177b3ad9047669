/** Gesture-to-submission integration: pointer events on the card element
 * drive the tracker, the tracker drives the deck, the deck talks to the
 * (fake) server. The jsdom equivalent of a browser gesture test. */

import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { DeckController, DeckView } from '../src/deck.js';
import { SwipeTracker } from '../src/gesture.js';
import type { PatchInfo, Progress, Reveal } from '../src/types.js';
import { FakeServer, fakeApi, makePatches, makeStudy } from './fakeserver.js';

const CARD_WIDTH = 300;
const CARD_HEIGHT = 400;

function pointer(type: string, x: number, y: number): PointerEvent {
  const event = new Event(type, { bubbles: true }) as PointerEvent;
  Object.assign(event, { clientX: x, clientY: y, pointerType: 'touch', pointerId: 1 });
  return event;
}

function setup(server: FakeServer, dragTickMs = 50) {
  const card = document.createElement('div');
  card.getBoundingClientRect = () =>
    ({ width: CARD_WIDTH, height: CARD_HEIGHT, top: 0, left: 0,
       right: CARD_WIDTH, bottom: CARD_HEIGHT, x: 0, y: 0,
       toJSON: () => ({}) }) as DOMRect;
  document.body.appendChild(card);

  const shown: PatchInfo[] = [];
  const view: DeckView = {
    showCard: (patch) => shown.push(patch),
    showDone: () => undefined,
    showProgress: (_: Progress) => undefined,
    showReveal: (_: Reveal) => undefined,
    hideReveal: () => undefined,
    showPostponeCue: () => undefined,
    showHint: () => undefined,
    snapBack: () => undefined,
  };

  let time = 0;
  const deck = new DeckController(
    fakeApi(server) as unknown as ApiClient, server.study, view,
    'mobile', () => (time += 300), async () => undefined);

  // resolve once the deck has handled a committed gesture
  let settled: (() => void) | null = null;
  new SwipeTracker(card, {
    onCommit(gesture) {
      void deck.swipe(gesture.direction).then(() => settled?.());
    },
  }, () => (time += dragTickMs));

  const flush = () => new Promise<void>((resolve) => {
    settled = resolve;
    // give unsettled microtasks a chance when no commit fires
    setTimeout(resolve, 0);
  });

  return { card, deck, shown, flush };
}

describe('pointer gestures drive submissions', () => {
  it('an over-threshold right drag issues one submission with direction=right', async () => {
    const server = new FakeServer(makeStudy(), makePatches(3));
    const { card, deck, flush } = setup(server);
    await deck.start();

    card.dispatchEvent(pointer('pointerdown', 20, 200));
    card.dispatchEvent(pointer('pointermove', 100, 204));
    card.dispatchEvent(pointer('pointerup', 20 + CARD_WIDTH * 0.4, 206));
    await flush();

    expect(server.submitCalls).toHaveLength(1);
    expect(server.submitCalls[0].direction).toBe('right');
    expect(server.decisions[0].label).toBe('atypical');
  });

  it('a sub-threshold slow drag issues no submission', async () => {
    const server = new FakeServer(makeStudy(), makePatches(3));
    // 2 s between down and up: well under any fling velocity
    const { card, deck, flush } = setup(server, 2000);
    await deck.start();

    // 10 % of the card width, far below the 35 % commit threshold
    card.dispatchEvent(pointer('pointerdown', 20, 200));
    card.dispatchEvent(pointer('pointerup', 20 + CARD_WIDTH * 0.1, 200));
    await flush();

    expect(server.submitCalls).toHaveLength(0);
  });

  it('undo after a gesture restores the previous card and matches /progress', async () => {
    const server = new FakeServer(makeStudy(), makePatches(3));
    const { card, deck, shown, flush } = setup(server);
    await deck.start();
    const firstCard = shown[0];

    card.dispatchEvent(pointer('pointerdown', 250, 200));
    card.dispatchEvent(pointer('pointerup', 250 - CARD_WIDTH * 0.5, 200));
    await flush();
    expect(deck.progress.labeled).toBe(1);

    await deck.undo();
    expect(shown[shown.length - 1].patch_id).toBe(firstCard.patch_id);
    const reconciled = await deck.reconcile();
    expect(reconciled).toEqual(server.progress());
    expect(reconciled.labeled).toBe(0);
  });

  it('arrow-key gestures submit in the pressed direction', async () => {
    const server = new FakeServer(makeStudy(), makePatches(2));
    const { card, deck, flush } = setup(server);
    await deck.start();

    card.dispatchEvent(new KeyboardEvent('keydown', { key: 'ArrowUp' }));
    await flush();

    expect(server.submitCalls).toHaveLength(1);
    expect(server.submitCalls[0].direction).toBe('up');
    expect(server.progress().postpone_remaining).toBe(1);
  });
});
