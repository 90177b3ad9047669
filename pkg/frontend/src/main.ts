/** Application bootstrap: login, study list, deck wiring. */

import { AdminPanel } from './admin.js';
import { ApiClient, ApiError } from './api.js';
import { DeckController, DeckView, detectDeviceType } from './deck.js';
import { SwipeTracker } from './gesture.js';
import { OnboardingFlow } from './onboarding.js';
import {
  renderCardImage,
  renderProgress,
  resetCardOffset,
  setCardOffset,
} from './render.js';
import type { PatchInfo, Progress, Reveal, StudyInfo } from './types.js';

const api = new ApiClient('');
let token = '';
let userId = '';

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function show(section: 'login' | 'studies' | 'deck' | 'admin'): void {
  for (const name of ['login', 'studies', 'deck', 'admin']) {
    el(`${name}-screen`).hidden = name !== section;
  }
}

async function onLogin(): Promise<void> {
  const status = el<HTMLElement>('login-status');
  status.textContent = '';
  try {
    const session = await api.login(
      el<HTMLInputElement>('login-user').value.trim(),
      el<HTMLInputElement>('login-password').value,
    );
    token = session.token;
    userId = session.user_id;
    api.setToken(token);
    if (session.role === 'admin') {
      new AdminPanel(api, el('admin-screen'), token).render();
      show('admin');
    } else {
      await showStudyList();
    }
  } catch (error) {
    status.textContent = error instanceof ApiError
      ? error.message : 'cannot reach the server';
  }
}

async function showStudyList(): Promise<void> {
  const listing = await api.listStudies();
  const list = el<HTMLUListElement>('study-list');
  list.innerHTML = '';
  for (const study of listing.studies) {
    const item = document.createElement('li');
    const button = document.createElement('button');
    const state = study.progress.completed
      ? 'completed'
      : `${study.progress.labeled}/${study.progress.total}`;
    button.textContent = `${study.study_id} (${study.mode}, ${state})`;
    button.onclick = () => void openStudy(study);
    item.appendChild(button);
    list.appendChild(item);
  }
  if (!listing.studies.length) {
    list.innerHTML = '<li>No studies assigned yet.</li>';
  }
  show('studies');
}

async function openStudy(study: StudyInfo): Promise<void> {
  show('deck');
  const card = el<HTMLElement>('card');
  const onboarding = new OnboardingFlow(userId);

  const view: DeckView = {
    showCard(patch: PatchInfo) {
      resetCardOffset(card);
      renderCardImage(card, patch, study.display, token);
      card.focus();
    },
    showDone(progress: Progress) {
      resetCardOffset(card);
      card.innerHTML = `<div class="done">All ${progress.total} patches labeled.
        Thank you!</div>`;
    },
    showProgress(progress: Progress) {
      renderProgress(el('progress'), progress);
    },
    showReveal(reveal: Reveal) {
      const overlay = el<HTMLElement>('reveal');
      overlay.hidden = false;
      overlay.querySelector('.reveal-text')!.textContent = reveal.was_correct
        ? `Correct: this is "${reveal.true_label}"`
        : `Not quite: the correct label is "${reveal.true_label}"`;
      overlay.classList.toggle('correct', reveal.was_correct);
    },
    hideReveal() {
      el<HTMLElement>('reveal').hidden = true;
    },
    showPostponeCue() {
      flashHint('postponed: the patch returns at the end of the deck');
    },
    showHint(message: string) {
      flashHint(message);
    },
    snapBack() {
      resetCardOffset(card);
    },
  };

  const deck = new DeckController(api, study, view, detectDeviceType());

  new SwipeTracker(card, {
    onCommit(gesture) {
      void deck.swipe(gesture.direction);
    },
    onDrag(dx, dy) {
      setCardOffset(card, dx, dy);
    },
    onSnapBack() {
      resetCardOffset(card);
    },
  });

  el<HTMLButtonElement>('undo-button').onclick = () => void deck.undo();
  el<HTMLButtonElement>('postpone-button').onclick = () => void deck.postpone();
  el<HTMLButtonElement>('reveal-ack').onclick = () => void deck.acknowledgeReveal();
  el<HTMLButtonElement>('back-to-studies').onclick = () => void showStudyList();
  el<HTMLButtonElement>('replay-intro').onclick = () => {
    onboarding.reset();
    renderOnboarding(onboarding, study, true);
  };

  const progress = await api.progress(study.study_id);
  renderOnboarding(onboarding, study, onboarding.shouldShow(progress.first_visit));
  await deck.start();
}

function renderOnboarding(flow: OnboardingFlow, study: StudyInfo,
                          visible: boolean): void {
  const overlay = el<HTMLElement>('onboarding');
  if (!visible) {
    overlay.hidden = true;
    return;
  }
  const legend = el<HTMLUListElement>('onboarding-legend');
  legend.innerHTML = '';
  for (const line of flow.legend(study.mapping)) {
    const item = document.createElement('li');
    item.textContent = line;
    legend.appendChild(item);
  }
  overlay.hidden = false;
  el<HTMLButtonElement>('onboarding-dismiss').onclick = () => {
    flow.markSeen();
    overlay.hidden = true;
  };
}

let hintTimer: ReturnType<typeof setTimeout> | undefined;

function flashHint(message: string): void {
  const hint = el<HTMLElement>('hint');
  hint.textContent = message;
  hint.hidden = false;
  clearTimeout(hintTimer);
  hintTimer = setTimeout(() => {
    hint.hidden = true;
  }, 1800);
}

export function bootstrap(): void {
  el<HTMLButtonElement>('login-button').onclick = () => void onLogin();
  el<HTMLInputElement>('login-password').addEventListener('keydown', (event) => {
    if (event.key === 'Enter') void onLogin();
  });
  show('login');
}

if (typeof document !== 'undefined' && document.getElementById('login-screen')) {
  bootstrap();
}
