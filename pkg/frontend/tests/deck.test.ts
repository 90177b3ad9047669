/** Deck controller against the in-memory fake server: submission payloads,
 * reveal gating, undo reconciliation, retries, and the single-in-flight
 * invariant. */

import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { DeckController, DeckView, detectDeviceType } from '../src/deck.js';
import type { PatchInfo, Progress, Reveal } from '../src/types.js';
import { FakeServer, fakeApi, makePatches, makeStudy } from './fakeserver.js';

class RecordingView implements DeckView {
  cards: PatchInfo[] = [];
  progressUpdates: Progress[] = [];
  reveals: Reveal[] = [];
  hints: string[] = [];
  snapBacks = 0;
  postponeCues = 0;
  doneShown = false;
  revealVisible = false;

  showCard(patch: PatchInfo) { this.cards.push(patch); }
  showDone() { this.doneShown = true; }
  showProgress(progress: Progress) { this.progressUpdates.push(progress); }
  showReveal(reveal: Reveal) { this.reveals.push(reveal); this.revealVisible = true; }
  hideReveal() { this.revealVisible = false; }
  showPostponeCue() { this.postponeCues += 1; }
  showHint(message: string) { this.hints.push(message); }
  snapBack() { this.snapBacks += 1; }
}

function makeDeck(server: FakeServer, overrides: {
  now?: () => number;
  sleep?: (ms: number) => Promise<void>;
} = {}) {
  const view = new RecordingView();
  let time = 0;
  const deck = new DeckController(
    fakeApi(server) as unknown as ApiClient,
    server.study,
    view,
    'desktop',
    overrides.now ?? (() => (time += 450)),
    overrides.sleep ?? (async () => undefined),
  );
  return { deck, view };
}

describe('DeckController swipes', () => {
  let server: FakeServer;

  beforeEach(() => {
    server = new FakeServer(makeStudy(), makePatches(3));
  });

  it('a committed right swipe issues exactly one submission with direction=right', async () => {
    const { deck } = makeDeck(server);
    await deck.start();
    const sent = await deck.swipe('right');
    expect(sent).toBe(true);
    expect(server.submitCalls).toHaveLength(1);
    expect(server.submitCalls[0].direction).toBe('right');
    expect(server.decisions[0].label).toBe('atypical');
  });

  it('unmapped directions snap back without any submission', async () => {
    const { deck, view } = makeDeck(server);
    await deck.start();
    const sent = await deck.swipe('down'); // not in the mapping
    expect(sent).toBe(false);
    expect(server.submitCalls).toHaveLength(0);
    expect(view.snapBacks).toBe(1);
    expect(view.hints[0]).toContain('down');
  });

  it('advances to the next card only after the server confirms', async () => {
    const { deck, view } = makeDeck(server);
    await deck.start();
    expect(view.cards).toHaveLength(1);
    await deck.swipe('left');
    expect(view.cards).toHaveLength(2);
    expect(view.cards[1].patch_id).not.toBe(view.cards[0].patch_id);
  });

  it('sends the monotonic client duration and device type', async () => {
    const { deck } = makeDeck(server);
    await deck.start();          // presentation at t=450*k
    await deck.swipe('left');
    const payload = server.submitCalls[0];
    expect(payload.client_duration_ms).toBeGreaterThan(0);
    expect(payload.device_type).toBe('desktop');
  });

  it('postpone shows a cue and moves on', async () => {
    const { deck, view } = makeDeck(server);
    await deck.start();
    await deck.swipe('up');
    expect(view.postponeCues).toBe(1);
    expect(deck.progress.postpone_remaining).toBe(1);
  });

  it('the explicit postpone button submits postpone=true', async () => {
    const { deck } = makeDeck(server);
    await deck.start();
    await deck.postpone();
    expect(server.submitCalls[0].postpone).toBe(true);
  });

  it('completes the deck and shows done', async () => {
    const { deck, view } = makeDeck(server);
    await deck.start();
    await deck.swipe('left');
    await deck.swipe('right');
    await deck.swipe('left');
    expect(view.doneShown).toBe(true);
    expect(deck.progress.completed).toBe(true);
  });

  it('progress always equals the server progress endpoint', async () => {
    const { deck } = makeDeck(server);
    await deck.start();
    await deck.swipe('left');
    await deck.swipe('up');
    const reconciled = await deck.reconcile();
    expect(reconciled).toEqual(server.progress());
    expect(deck.progress).toEqual(server.progress());
  });
});

describe('DeckController undo', () => {
  it('restores the previous card and matches server progress', async () => {
    const server = new FakeServer(makeStudy(), makePatches(3));
    const { deck, view } = makeDeck(server);
    await deck.start();
    const firstCard = view.cards[0];
    await deck.swipe('left');
    expect(deck.progress.labeled).toBe(1);

    await deck.undo();
    expect(view.cards[view.cards.length - 1].patch_id).toBe(firstCard.patch_id);
    expect(deck.progress.labeled).toBe(0);
    expect(deck.progress).toEqual(server.progress());
  });

  it('undo with nothing to undo surfaces a hint, not a crash', async () => {
    const server = new FakeServer(makeStudy(), makePatches(2));
    const { deck, view } = makeDeck(server);
    await deck.start();
    await deck.undo();
    expect(view.hints.length).toBeGreaterThan(0);
  });
});

describe('training mode reveal', () => {
  function trainingServer() {
    return new FakeServer(
      makeStudy({ mode: 'training' }), makePatches(2),
      ['atypical', 'normal']);
  }

  it('reveals the true label and blocks advancing until acknowledged', async () => {
    const server = trainingServer();
    const { deck, view } = makeDeck(server);
    await deck.start();
    await deck.swipe('right');
    expect(view.reveals).toHaveLength(1);
    expect(view.reveals[0]).toEqual({ true_label: 'atypical', was_correct: true });
    expect(view.cards).toHaveLength(1); // still on the first card

    // swipes while the reveal is up are ignored
    const sent = await deck.swipe('left');
    expect(sent).toBe(false);
    expect(server.submitCalls).toHaveLength(1);

    await deck.acknowledgeReveal();
    expect(view.revealVisible).toBe(false);
    expect(view.cards).toHaveLength(2);
  });

  it('wrong answers reveal the correct label', async () => {
    const server = trainingServer();
    const { deck, view } = makeDeck(server);
    await deck.start();
    await deck.swipe('left'); // truth is atypical
    expect(view.reveals[0]).toEqual({ true_label: 'atypical', was_correct: false });
  });
});

describe('display settings never touch payloads', () => {
  it.each([
    { scale_percent: 100, interpolation_enabled: false },
    { scale_percent: 50, interpolation_enabled: true },
    { scale_percent: 10, interpolation_enabled: false },
  ])('payload is identical under display=%o', async (display) => {
    const server = new FakeServer(
      makeStudy({ display }), makePatches(1));
    const { deck } = makeDeck(server);
    await deck.start();
    await deck.swipe('left');
    const payload = server.submitCalls[0];
    expect(payload).toEqual({
      direction: 'left',
      client_duration_ms: payload.client_duration_ms,
      device_type: 'desktop',
    });
    // nothing about the display settings leaks into the request
    expect(JSON.stringify(payload)).not.toContain('scale');
    expect(JSON.stringify(payload)).not.toContain('interpolation');
  });
});

describe('network failure handling', () => {
  it('retries a failed submission until the server confirms; no card skip', async () => {
    const server = new FakeServer(makeStudy(), makePatches(2));
    server.failNextSubmits = 2;
    const sleeps: number[] = [];
    const { deck, view } = makeDeck(server, {
      sleep: async (ms) => { sleeps.push(ms); },
    });
    await deck.start();
    await deck.swipe('left');
    expect(server.submitCalls).toHaveLength(3); // two failures, then success
    expect(server.decisions).toHaveLength(1);   // exactly one decision recorded
    expect(sleeps).toHaveLength(2);
    expect(view.cards).toHaveLength(2);         // advanced exactly once
  });

  it('keeps exactly one submission in flight', async () => {
    const server = new FakeServer(makeStudy(), makePatches(2));
    let release: () => void = () => undefined;
    const gate = new Promise<void>((resolve) => { release = resolve; });
    const api = fakeApi(server);
    const slowApi = {
      ...api,
      submit: async (studyId: string, payload: never) => {
        await gate;
        return api.submit(studyId, payload);
      },
    };
    const view = new RecordingView();
    const deck = new DeckController(
      slowApi as unknown as ApiClient, server.study, view, 'desktop',
      () => 1000, async () => undefined);
    await deck.start();

    const first = deck.swipe('left');
    const second = deck.swipe('right'); // while the first is in flight
    expect(deck.busy).toBe(true);
    release();
    const [sentFirst, sentSecond] = await Promise.all([first, second]);
    expect(sentFirst).toBe(true);
    expect(sentSecond).toBe(false);
    expect(server.submitCalls).toHaveLength(1);
  });
});

describe('detectDeviceType', () => {
  it('classifies by touch capability and width', () => {
    expect(detectDeviceType(1400, false)).toBe('desktop');
    expect(detectDeviceType(400, true)).toBe('mobile');
    expect(detectDeviceType(1100, true)).toBe('tablet');
    expect(detectDeviceType(0, false)).toBe('unknown');
  });
});
